//! Dataset manifest: a TOML file binding samples on disk to the pipeline.
//!
//! ```toml
//! eval_resolution = "quarter"      # "full" (default) or "quarter"
//! class_map = "booster"            # preset, or { tom = [2, 3], other = [0, 1] }
//!
//! [calibration]                    # optional, dataset-wide
//! focal = 1000.0                   # pixels
//! baseline = 100.0                 # millimeters
//!
//! [[samples]]
//! id = "scene01"
//! left = "images/scene01_left.png"
//! right = "images/scene01_right.png"   # stereo samples only
//! mask = "masks/scene01.png"           # class-id raster
//! gt = "gt/scene01.pfm"                # .pfm or 16-bit .png
//! gt_space = "disparity_px"            # or "depth_mm"; required with gt
//! calibration = { focal = 1000.0, baseline = 100.0 }   # per-sample override
//! ```
//!
//! Every path is relative to the directory holding the manifest.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::classes::ClassCollapseRule;
use crate::geometry::StereoCalibration;
use crate::raster::Space;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalResolution {
    #[default]
    Full,
    Quarter,
}

impl FromStr for EvalResolution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full" => Ok(EvalResolution::Full),
            "quarter" => Ok(EvalResolution::Quarter),
            other => Err(format!("unknown resolution `{other}` (expected full or quarter)")),
        }
    }
}

/// Unit of a ground-truth file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GtSpace {
    DepthMm,
    DisparityPx,
}

impl GtSpace {
    pub fn space(self) -> Space {
        match self {
            GtSpace::DepthMm => Space::DepthMm,
            GtSpace::DisparityPx => Space::DisparityPx,
        }
    }
}

impl FromStr for GtSpace {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "depth_mm" => Ok(GtSpace::DepthMm),
            "disparity_px" => Ok(GtSpace::DisparityPx),
            other => Err(format!(
                "unknown gt space `{other}` (expected depth_mm or disparity_px)"
            )),
        }
    }
}

impl fmt::Display for GtSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.space().as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub id: String,
    pub left: PathBuf,
    pub right: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub gt: Option<PathBuf>,
    pub gt_space: Option<GtSpace>,
    pub calibration: Option<StereoCalibration>,
}

impl SampleRecord {
    pub fn is_stereo(&self) -> bool {
        self.right.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetManifest {
    /// Directory the sample paths were resolved against.
    pub root: PathBuf,
    pub samples: Vec<SampleRecord>,
    pub class_map: ClassCollapseRule,
    pub calibration: Option<StereoCalibration>,
    pub eval_resolution: EvalResolution,
}

impl DatasetManifest {
    /// Per-sample calibration, falling back to the dataset-wide one.
    pub fn calibration_for(&self, sample: &SampleRecord) -> Option<StereoCalibration> {
        sample.calibration.or(self.calibration)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    eval_resolution: Option<String>,
    #[serde(default)]
    class_map: Option<RawClassMap>,
    #[serde(default)]
    calibration: Option<StereoCalibration>,
    #[serde(default)]
    samples: Vec<RawSample>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawClassMap {
    Preset(String),
    Explicit { tom: Vec<u16>, other: Vec<u16> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    id: String,
    left: PathBuf,
    right: Option<PathBuf>,
    mask: Option<PathBuf>,
    gt: Option<PathBuf>,
    gt_space: Option<String>,
    calibration: Option<StereoCalibration>,
}

fn manifest_err(sample: Option<&str>, reason: impl Into<String>) -> Error {
    Error::Manifest {
        sample: sample.map(str::to_owned),
        reason: reason.into(),
    }
}

fn resolve(root: &Path, id: &str, field: &str, rel: &Path) -> Result<PathBuf> {
    if rel.is_absolute() {
        return Err(manifest_err(
            Some(id),
            format!("{field} path {} must be relative to the manifest", rel.display()),
        ));
    }
    let full = root.join(rel);
    if !full.is_file() {
        return Err(manifest_err(
            Some(id),
            format!("{field} path {} does not exist", rel.display()),
        ));
    }
    Ok(full)
}

/// Parses manifest text. Sample paths are resolved against `root` and must
/// exist.
pub fn parse_manifest(text: &str, root: &Path) -> Result<DatasetManifest> {
    let raw: RawManifest =
        toml::from_str(text).map_err(|e| manifest_err(None, e.to_string()))?;

    let eval_resolution = match raw.eval_resolution.as_deref() {
        None => EvalResolution::Full,
        Some(s) => s.parse().map_err(|e: String| manifest_err(None, e))?,
    };
    let class_map = match raw.class_map {
        None => ClassCollapseRule::binary(),
        Some(RawClassMap::Preset(name)) => ClassCollapseRule::preset(&name)
            .ok_or_else(|| manifest_err(None, format!("unknown class_map preset `{name}`")))?,
        Some(RawClassMap::Explicit { tom, other }) => ClassCollapseRule::new(tom, other)?,
    };
    if let Some(c) = &raw.calibration {
        c.validate()
            .map_err(|e| manifest_err(None, format!("calibration: {e}")))?;
    }

    let mut seen = HashSet::new();
    let mut samples = Vec::with_capacity(raw.samples.len());
    for s in raw.samples {
        let id = s.id.as_str();
        if id.is_empty() || id.contains(['/', '\\']) {
            return Err(manifest_err(
                Some(id),
                "sample id must be non-empty and contain no path separators",
            ));
        }
        if !seen.insert(s.id.clone()) {
            return Err(manifest_err(Some(id), "duplicate sample id"));
        }
        let gt_space = s
            .gt_space
            .as_deref()
            .map(|t| t.parse::<GtSpace>().map_err(|e| manifest_err(Some(id), e)))
            .transpose()?;
        if s.gt.is_some() && gt_space.is_none() {
            return Err(manifest_err(Some(id), "gt given without gt_space"));
        }
        if let Some(c) = &s.calibration {
            c.validate()
                .map_err(|e| manifest_err(Some(id), format!("calibration: {e}")))?;
        }
        let opt = |field: &str, p: &Option<PathBuf>| {
            p.as_deref().map(|p| resolve(root, id, field, p)).transpose()
        };
        samples.push(SampleRecord {
            left: resolve(root, id, "left", &s.left)?,
            right: opt("right", &s.right)?,
            mask: opt("mask", &s.mask)?,
            gt: opt("gt", &s.gt)?,
            gt_space,
            calibration: s.calibration,
            id: s.id,
        });
    }

    Ok(DatasetManifest {
        root: root.to_path_buf(),
        samples,
        class_map,
        calibration: raw.calibration,
        eval_resolution,
    })
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| manifest_err(None, format!("cannot read {}: {e}", path.display())))?;
    let root = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    parse_manifest(&text, &root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn touch(dir: &Path, rel: &str) {
        let p = dir.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, b"x").unwrap();
    }

    fn setup() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for f in ["a_l.png", "a_r.png", "b_l.png", "b_r.png", "m/a.png", "gt/a.pfm"] {
            touch(dir.path(), f);
        }
        dir
    }

    #[test]
    fn two_stereo_samples() {
        let dir = setup();
        let text = r#"
            class_map = "booster"
            eval_resolution = "quarter"
            calibration = { focal = 1000.0, baseline = 100.0 }
            [[samples]]
            id = "a"
            left = "a_l.png"
            right = "a_r.png"
            mask = "m/a.png"
            gt = "gt/a.pfm"
            gt_space = "disparity_px"
            [[samples]]
            id = "b"
            left = "b_l.png"
            right = "b_r.png"
        "#;
        let m = parse_manifest(text, dir.path()).unwrap();
        assert_eq!(m.samples.len(), 2);
        assert!(m.samples.iter().all(SampleRecord::is_stereo));
        assert_eq!(m.eval_resolution, EvalResolution::Quarter);
        assert_eq!(m.class_map, ClassCollapseRule::booster());
        assert_eq!(m.samples[0].gt_space, Some(GtSpace::DisparityPx));
        assert_eq!(m.calibration_for(&m.samples[1]).unwrap().focal, 1000.0);
        // deterministic
        assert_eq!(m, parse_manifest(text, dir.path()).unwrap());
    }

    #[test]
    fn duplicate_id_is_named() {
        let dir = setup();
        let text = r#"
            [[samples]]
            id = "a"
            left = "a_l.png"
            [[samples]]
            id = "a"
            left = "b_l.png"
        "#;
        let err = parse_manifest(text, dir.path()).unwrap_err();
        assert!(matches!(&err, Error::Manifest { sample: Some(s), .. } if s == "a"), "{err}");
    }

    #[test]
    fn unknown_gt_space_is_rejected() {
        let dir = setup();
        let text = r#"
            [[samples]]
            id = "a"
            left = "a_l.png"
            gt = "gt/a.pfm"
            gt_space = "meters"
        "#;
        let err = parse_manifest(text, dir.path()).unwrap_err();
        assert!(err.to_string().contains("meters"));
    }

    #[test]
    fn dangling_and_absolute_paths() {
        let dir = setup();
        let dangling = "[[samples]]\nid = \"z\"\nleft = \"missing.png\"\n";
        let err = parse_manifest(dangling, dir.path()).unwrap_err();
        assert!(matches!(&err, Error::Manifest { sample: Some(s), .. } if s == "z"));
        let abs = "[[samples]]\nid = \"z\"\nleft = \"/etc/passwd\"\n";
        assert!(parse_manifest(abs, dir.path()).is_err());
    }

    #[test]
    fn explicit_class_map_and_missing_file() {
        let dir = setup();
        let text = "class_map = { tom = [1, 2], other = [0] }\n";
        let m = parse_manifest(text, dir.path()).unwrap();
        assert!(m.class_map.tom_classes.contains(&2));
        assert!(matches!(
            load_manifest(&dir.path().join("nope.toml")),
            Err(Error::Manifest { .. })
        ));
    }
}
