//! Sample fan-out, run summaries and the exit-code contract.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use tomdistill::formats::{load_manifest, write_atomic, DatasetManifest, SampleRecord};

use crate::args::RunArgs;

/// Failure that prevents a run from starting at all.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARTIAL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

pub struct Outcome<T> {
    pub id: String,
    pub result: Result<T, String>,
}

impl<T> Outcome<T> {
    pub fn ok(&self) -> Option<&T> {
        self.result.as_ref().ok()
    }
}

pub fn load(run: &RunArgs) -> Result<DatasetManifest, ConfigError> {
    let manifest = load_manifest(&run.manifest)?;
    fs::create_dir_all(&run.out)
        .map_err(|e| ConfigError(format!("cannot create {}: {e}", run.out.display())))?;
    Ok(manifest)
}

/// Runs `f` over all samples on a pool of `workers` threads. Outcomes come
/// back in manifest order whatever the scheduling.
pub fn for_each_sample<T, F>(
    samples: &[SampleRecord],
    workers: u32,
    fail_fast: bool,
    f: F,
) -> Result<Vec<Outcome<T>>, ConfigError>
where
    T: Send,
    F: Fn(&SampleRecord) -> tomdistill::Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers as usize)
        .build()?;
    let abort = AtomicBool::new(false);
    let outcomes = pool.install(|| {
        samples
            .par_iter()
            .map(|s| {
                if abort.load(Ordering::SeqCst) {
                    return Outcome {
                        id: s.id.clone(),
                        result: Err("skipped after an earlier failure".into()),
                    };
                }
                log::info!("sample {}", s.id);
                let result = f(s).map_err(|e| e.to_string());
                if result.is_err() && fail_fast {
                    abort.store(true, Ordering::SeqCst);
                }
                Outcome {
                    id: s.id.clone(),
                    result,
                }
            })
            .collect()
    });
    Ok(outcomes)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> tomdistill::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("JSON values always serialize");
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Writes `summary.json` and reports failures on stderr. The summary holds
/// only run inputs and results so reruns reproduce it byte for byte.
pub fn finish<T>(
    out: &Path,
    command: &str,
    settings: Value,
    outcomes: &[Outcome<T>],
    describe: impl Fn(&T) -> Value,
) -> Result<ExitCode, ConfigError> {
    let mut failed = Vec::new();
    let samples: Vec<Value> = outcomes
        .iter()
        .map(|o| match &o.result {
            Ok(t) => json!({ "id": o.id, "status": "ok", "outputs": describe(t) }),
            Err(e) => {
                eprintln!("sample {}: {e}", o.id);
                failed.push(o.id.clone());
                json!({ "id": o.id, "status": "failed", "error": e })
            }
        })
        .collect();
    let summary = json!({
        "command": command,
        "settings": settings,
        "samples": samples,
        "failed": failed,
    });
    write_json(&out.join("summary.json"), &summary)?;
    if failed.is_empty() {
        Ok(ExitCode::from(EXIT_OK))
    } else {
        eprintln!(
            "{} of {} sample(s) failed: {}",
            failed.len(),
            outcomes.len(),
            failed.join(", ")
        );
        Ok(ExitCode::from(EXIT_PARTIAL))
    }
}
