use std::process::ExitCode;

use serde_json::{json, Value};
use tomdistill::backend::BackendSpec;
use tomdistill::distill::{
    distill_mono, distill_stereo_merged, distill_stereo_virtual_disparity, DistillConfig, Distilled,
    Strategy,
};
use tomdistill::formats::{write_pfm, SampleRecord};
use tomdistill::{Result, Space};

use crate::args::{MonoArgs, PaletteArgs, RunArgs, StereoArgs, StereoStrategy};
use crate::loaders;
use crate::runner::{self, write_json, ConfigError};

fn config(palette: &PaletteArgs, strategy: Strategy) -> Result<DistillConfig> {
    DistillConfig::new(palette.colors as usize, palette.seed, strategy)
}

/// Writes `labels/<id>.pfm` and its provenance sidecar `labels/<id>.json`.
fn store(run: &RunArgs, sample: &SampleRecord, d: &Distilled) -> Result<()> {
    let dir = run.out.join("labels");
    std::fs::create_dir_all(&dir).map_err(|e| tomdistill::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    write_pfm(&d.map, &dir.join(format!("{}.pfm", sample.id)))?;
    write_json(&dir.join(format!("{}.json", sample.id)), &d.provenance)
}

fn describe(id: &str) -> Value {
    json!({
        "label": format!("labels/{id}.pfm"),
        "provenance": format!("labels/{id}.json"),
    })
}

pub fn mono(args: &MonoArgs) -> std::result::Result<ExitCode, ConfigError> {
    let manifest = runner::load(&args.run)?;
    let backend = BackendSpec::parse(&args.backend, args.mono_space)?;
    let cfg = config(&args.palette, Strategy::MonoVirtualDepth)?;

    let outcomes = runner::for_each_sample(
        &manifest.samples,
        args.run.workers,
        args.run.fail_fast,
        |sample| {
            let image = loaders::left(sample)?;
            let mask = loaders::mask(&manifest, sample)?;
            let d = distill_mono(&image, &mask, &sample.id, &backend, &cfg)?;
            store(&args.run, sample, &d)?;
            Ok(sample.id.clone())
        },
    )?;
    let settings = json!({
        "strategy": cfg.strategy,
        "colors": cfg.num_colors,
        "seed": cfg.seed,
        "backend": backend.to_string(),
        "mono_space": args.mono_space,
    });
    runner::finish(&args.run.out, "distill mono", settings, &outcomes, |id| describe(id))
}

pub fn stereo(args: &StereoArgs) -> std::result::Result<ExitCode, ConfigError> {
    let manifest = runner::load(&args.run)?;
    let stereo_backend = BackendSpec::parse(&args.stereo_backend, Space::DisparityPx)?;
    let strategy = match args.strategy {
        StereoStrategy::StereoMerged => Strategy::StereoMerged,
        StereoStrategy::StereoVirtualDisparity => Strategy::StereoVirtualDisparity,
    };
    let mono_backend = match (&args.mono_backend, strategy) {
        (Some(b), _) => Some(BackendSpec::parse(b, args.mono_space)?),
        (None, Strategy::StereoMerged) => {
            return Err(ConfigError("stereo_merged needs --mono-backend".into()))
        }
        (None, _) => None,
    };
    let cfg = config(&args.palette, strategy)?;

    let outcomes = runner::for_each_sample(
        &manifest.samples,
        args.run.workers,
        args.run.fail_fast,
        |sample| {
            let left = loaders::left(sample)?;
            let right = loaders::right(sample)?;
            let mask = loaders::mask(&manifest, sample)?;
            let d = match (strategy, &mono_backend) {
                (Strategy::StereoMerged, Some(mono)) => {
                    let calib = manifest.calibration_for(sample);
                    distill_stereo_merged(
                        &left,
                        &right,
                        &mask,
                        &sample.id,
                        mono,
                        &stereo_backend,
                        &cfg,
                        calib.as_ref(),
                    )?
                }
                _ => {
                    let gt = loaders::gt_disparity(&manifest, sample)?;
                    distill_stereo_virtual_disparity(
                        &left,
                        &right,
                        &mask,
                        &gt,
                        &sample.id,
                        &stereo_backend,
                        &cfg,
                    )?
                }
            };
            store(&args.run, sample, &d)?;
            Ok(sample.id.clone())
        },
    )?;
    let settings = json!({
        "strategy": cfg.strategy,
        "colors": cfg.num_colors,
        "seed": cfg.seed,
        "stereo_backend": stereo_backend.to_string(),
        "mono_backend": mono_backend.as_ref().map(|b| b.to_string()),
        "mono_space": args.mono_space,
    });
    runner::finish(&args.run.out, "distill stereo", settings, &outcomes, |id| describe(id))
}
