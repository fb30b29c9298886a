//! Opaque depth and disparity predictors.
//!
//! A backend is either a directory of precomputed PFM predictions or an
//! external command. Commands exchange file paths, not pixels: the input
//! image(s) are written as PNG into a private temp directory, the template
//! placeholders are substituted, and the command must write a single-channel
//! PFM to `{output}` and exit 0.
//!
//! Templates are split on whitespace into argv; no shell is involved.
//! Placeholders may appear inside a token, e.g. `--out={output}`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::Command;

use crate::error::{Error, Result};
use crate::formats::{read_pfm, write_rgb_png};
use crate::raster::{ensure_same_dims, RgbImage, ScalarMap, Space};

pub const INPUT: &str = "{input}";
pub const LEFT: &str = "{left}";
pub const RIGHT: &str = "{right}";
pub const OUTPUT: &str = "{output}";

/// Key of the prediction for the `color_index`-th in-painted image.
pub fn color_key(sample_id: &str, color_index: usize) -> String {
    format!("{sample_id}_c{color_index}")
}

/// Key of the prediction on the untouched image or pair.
pub fn base_key(sample_id: &str) -> String {
    format!("{sample_id}_base")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendKind {
    PrecomputedDir(PathBuf),
    ExternalExec(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendSpec {
    pub kind: BackendKind,
    pub output_space: Space,
}

impl BackendSpec {
    pub fn precomputed(dir: impl Into<PathBuf>, output_space: Space) -> Result<Self> {
        let dir = dir.into();
        if !dir.is_dir() {
            return Err(Error::backend(
                "-",
                format!("precomputed directory {} does not exist", dir.display()),
            ));
        }
        Ok(BackendSpec {
            kind: BackendKind::PrecomputedDir(dir),
            output_space,
        })
    }

    pub fn external(template: impl Into<String>, output_space: Space) -> Result<Self> {
        let template = template.into();
        let has_inputs = template.contains(INPUT)
            || (template.contains(LEFT) && template.contains(RIGHT));
        if !template.contains(OUTPUT) || !has_inputs {
            return Err(Error::backend(
                "-",
                format!(
                    "command template must contain {OUTPUT} and either {INPUT} or {LEFT} and {RIGHT}: `{template}`"
                ),
            ));
        }
        if template.split_whitespace().next().is_none() {
            return Err(Error::backend("-", "empty command template"));
        }
        Ok(BackendSpec {
            kind: BackendKind::ExternalExec(template),
            output_space,
        })
    }

    /// Parses `dir:<path>` or `exec:<command template>`.
    pub fn parse(s: &str, output_space: Space) -> Result<Self> {
        if let Some(dir) = s.strip_prefix("dir:") {
            Self::precomputed(dir, output_space)
        } else if let Some(cmd) = s.strip_prefix("exec:") {
            Self::external(cmd, output_space)
        } else {
            Err(Error::backend(
                "-",
                format!("backend `{s}` must start with `dir:` or `exec:`"),
            ))
        }
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BackendKind::PrecomputedDir(d) => write!(f, "dir:{}", d.display()),
            BackendKind::ExternalExec(t) => write!(f, "exec:{t}"),
        }
    }
}

fn check_output(map: ScalarMap, dims: (usize, usize), key: &str) -> Result<ScalarMap> {
    ensure_same_dims("prediction vs input", map.dims(), dims)
        .map_err(|e| Error::backend(key, e.to_string()))?;
    Ok(map)
}

fn read_precomputed(dir: &Path, key: &str, space: Space) -> Result<ScalarMap> {
    let path = dir.join(format!("{key}.pfm"));
    if !path.is_file() {
        return Err(Error::backend(
            key,
            format!("prediction {} not found", path.display()),
        ));
    }
    read_pfm(&path, space).map_err(|e| Error::backend(key, e.to_string()))
}

fn run_external(
    template: &str,
    inputs: &[(&str, &RgbImage)],
    key: &str,
    space: Space,
) -> Result<ScalarMap> {
    let tmp = tempfile::Builder::new()
        .prefix("tomdistill-")
        .tempdir()
        .map_err(|e| Error::backend(key, format!("temp dir: {e}")))?;
    let mut substitutions: Vec<(&str, PathBuf)> = Vec::with_capacity(inputs.len() + 1);
    for (placeholder, img) in inputs {
        let name = placeholder.trim_matches(['{', '}']);
        let path = tmp.path().join(format!("{name}.png"));
        write_rgb_png(img, &path).map_err(|e| Error::backend(key, e.to_string()))?;
        substitutions.push((placeholder, path));
    }
    let output = tmp.path().join("output.pfm");
    substitutions.push((OUTPUT, output.clone()));

    let argv: Vec<String> = template
        .split_whitespace()
        .map(|tok| {
            substitutions.iter().fold(tok.to_owned(), |t, (ph, p)| {
                t.replace(ph, &p.to_string_lossy())
            })
        })
        .collect();
    let out = Command::new(&argv[0])
        .args(&argv[1..])
        .output()
        .map_err(|e| Error::backend(key, format!("cannot run `{}`: {e}", argv[0])))?;
    if !out.status.success() {
        return Err(Error::backend(
            key,
            format!(
                "command exited with {}: {}",
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            ),
        ));
    }
    read_pfm(&output, space).map_err(|e| Error::backend(key, e.to_string()))
}

/// Runs a monocular predictor on `image`.
pub fn infer_mono(spec: &BackendSpec, image: &RgbImage, key: &str) -> Result<ScalarMap> {
    let map = match &spec.kind {
        BackendKind::PrecomputedDir(dir) => read_precomputed(dir, key, spec.output_space)?,
        BackendKind::ExternalExec(t) => {
            if !t.contains(INPUT) {
                return Err(Error::backend(key, format!("mono template lacks {INPUT}")));
            }
            run_external(t, &[(INPUT, image)], key, spec.output_space)?
        }
    };
    check_output(map, image.dims(), key)
}

/// Runs a stereo predictor on a rectified pair; the result is a left-view
/// disparity map.
pub fn infer_stereo(
    spec: &BackendSpec,
    left: &RgbImage,
    right: &RgbImage,
    key: &str,
) -> Result<ScalarMap> {
    ensure_same_dims("stereo pair", left.dims(), right.dims())
        .map_err(|e| Error::backend(key, e.to_string()))?;
    if spec.output_space != Space::DisparityPx {
        return Err(Error::backend(
            key,
            format!("stereo backend must emit disparity_px, declared {}", spec.output_space),
        ));
    }
    let map = match &spec.kind {
        BackendKind::PrecomputedDir(dir) => read_precomputed(dir, key, spec.output_space)?,
        BackendKind::ExternalExec(t) => {
            if !(t.contains(LEFT) && t.contains(RIGHT)) {
                return Err(Error::backend(
                    key,
                    format!("stereo template lacks {LEFT} or {RIGHT}"),
                ));
            }
            run_external(t, &[(LEFT, left), (RIGHT, right)], key, spec.output_space)?
        }
    };
    check_output(map, left.dims(), key)
}
