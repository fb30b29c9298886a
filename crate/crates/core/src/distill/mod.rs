//! Pseudo-label factories.
//!
//! * mono virtual depth: median over `N` predictions of color in-painted images;
//! * stereo merged: base stereo disparity outside ToM regions, aligned mono
//!   virtual depth inside them;
//! * stereo virtual disparity: median over `N` stereo predictions on pairs
//!   in-painted in both views.

mod align;
mod median;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use align::{apply_affine, fit_affine_lse};
pub use median::{median_aggregate, quorum};

use crate::backend::{base_key, color_key, infer_mono, infer_stereo, BackendSpec};
use crate::error::{Error, Result};
use crate::geometry::{depth_to_disparity, AffineAlignment, StereoCalibration};
use crate::inpaint::{inpaint, sample_palette, warp_mask_left_to_right, ColorPalette};
use crate::raster::{ensure_same_dims, InpaintColor, RgbImage, ScalarMap, Space, TomMask};

pub const DEFAULT_NUM_COLORS: usize = 5;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    MonoVirtualDepth,
    StereoVirtualDisparity,
    StereoMerged,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::MonoVirtualDepth => "mono_virtual_depth",
            Strategy::StereoVirtualDisparity => "stereo_virtual_disparity",
            Strategy::StereoMerged => "stereo_merged",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mono_virtual_depth" => Ok(Strategy::MonoVirtualDepth),
            "stereo_virtual_disparity" => Ok(Strategy::StereoVirtualDisparity),
            "stereo_merged" => Ok(Strategy::StereoMerged),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistillConfig {
    pub num_colors: usize,
    pub seed: u64,
    pub strategy: Strategy,
}

impl DistillConfig {
    pub fn new(num_colors: usize, seed: u64, strategy: Strategy) -> Result<Self> {
        if num_colors == 0 {
            return Err(Error::Domain("num_colors must be >= 1".into()));
        }
        Ok(DistillConfig {
            num_colors,
            seed,
            strategy,
        })
    }
}

impl Default for DistillConfig {
    fn default() -> Self {
        DistillConfig {
            num_colors: DEFAULT_NUM_COLORS,
            seed: DEFAULT_SEED,
            strategy: Strategy::MonoVirtualDepth,
        }
    }
}

/// What went into one distilled label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub sample_id: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub num_colors: usize,
    pub palette: Vec<InpaintColor>,
    pub backend_keys: Vec<String>,
    pub output_space: Space,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment: Option<AffineAlignment>,
    /// Fit support of the alignment, in pixels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment_support: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warp_dropped_invalid: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Distilled {
    pub map: ScalarMap,
    pub provenance: Provenance,
}

fn provenance(
    sample_id: &str,
    cfg: &DistillConfig,
    strategy: Strategy,
    palette: Option<&ColorPalette>,
    backend_keys: Vec<String>,
    output_space: Space,
) -> Provenance {
    Provenance {
        sample_id: sample_id.to_owned(),
        strategy,
        seed: cfg.seed,
        num_colors: cfg.num_colors,
        palette: palette.map(|p| p.colors.clone()).unwrap_or_default(),
        backend_keys,
        output_space,
        alignment: None,
        alignment_support: None,
        warp_dropped_invalid: None,
    }
}

/// Virtual depth: each palette color in-paints the ToM pixels of `image`
/// and the label is the per-pixel median of the resulting predictions. The
/// result lives in the mono backend's output space.
pub fn distill_mono(
    image: &RgbImage,
    mask: &TomMask,
    sample_id: &str,
    backend: &BackendSpec,
    cfg: &DistillConfig,
) -> Result<Distilled> {
    ensure_same_dims("image vs mask", image.dims(), mask.dims())?;
    let palette = sample_palette(cfg.seed, sample_id, cfg.num_colors)?;
    let mut maps = Vec::with_capacity(palette.len());
    let mut keys = Vec::with_capacity(palette.len());
    for (i, &color) in palette.colors.iter().enumerate() {
        let key = color_key(sample_id, i);
        let augmented = inpaint(image, mask, color)?;
        let map = infer_mono(backend, &augmented, &key)
            .map_err(|e| e.context(&format!("color {i} {:?}", color.to_array())))?;
        maps.push(map);
        keys.push(key);
    }
    let map = median_aggregate(&maps).map_err(|e| e.context(sample_id))?;
    let space = map.space();
    Ok(Distilled {
        map,
        provenance: provenance(
            sample_id,
            cfg,
            Strategy::MonoVirtualDepth,
            Some(&palette),
            keys,
            space,
        ),
    })
}

/// Brings a mono prediction into a space where a single affine map relates
/// it to disparity. Metric depth is triangulated first; affine inverse depth
/// and disparity are already affinely related to disparity.
fn mono_in_disparity_frame(
    mono: ScalarMap,
    calib: Option<&StereoCalibration>,
) -> Result<ScalarMap> {
    match mono.space() {
        Space::DepthMm => {
            let calib = calib.ok_or_else(|| {
                Error::Domain(
                    "mono backend emits depth_mm: stereo calibration is required to triangulate".into(),
                )
            })?;
            depth_to_disparity(&mono, calib)
        }
        Space::DisparityPx | Space::AffineInverseDepth => Ok(mono),
    }
}

/// Replaces ToM disparities of the base stereo prediction with the aligned
/// mono virtual depth. Pixels with `mask = 0` are copied from the base map
/// unchanged, validity included.
pub fn merge_with_base(
    base: &ScalarMap,
    mono: &ScalarMap,
    mask: &TomMask,
) -> Result<(ScalarMap, AffineAlignment, usize)> {
    ensure_same_dims("base vs mono", base.dims(), mono.dims())?;
    ensure_same_dims("base vs mask", base.dims(), mask.dims())?;
    if base.space() != Space::DisparityPx {
        return Err(Error::Domain(format!(
            "base prediction must be disparity_px, got {}",
            base.space()
        )));
    }
    let fit_mask: Vec<bool> = mask.data().iter().map(|&m| m == 0).collect();
    let support = (0..base.len())
        .filter(|&i| fit_mask[i] && base.valid()[i] && mono.valid()[i])
        .count();
    let alignment = fit_affine_lse(mono, base, &fit_mask)?;
    let aligned = apply_affine(mono, alignment, Space::DisparityPx);

    let mut values = base.values().to_vec();
    let mut valid = base.valid().to_vec();
    for (i, &m) in mask.data().iter().enumerate() {
        if m == 1 {
            values[i] = aligned.values()[i];
            valid[i] = aligned.valid()[i];
        }
    }
    let merged = ScalarMap::new(base.width(), base.height(), values, valid, Space::DisparityPx)?;
    Ok((merged, alignment, support))
}

/// Merged stereo labels: base disparity from the stereo backend on the
/// untouched pair, with ToM pixels taken from the left-view virtual depth
/// after least-squares alignment on the non-ToM pixels.
#[allow(clippy::too_many_arguments)]
pub fn distill_stereo_merged(
    left: &RgbImage,
    right: &RgbImage,
    mask: &TomMask,
    sample_id: &str,
    mono_backend: &BackendSpec,
    stereo_backend: &BackendSpec,
    cfg: &DistillConfig,
    calib: Option<&StereoCalibration>,
) -> Result<Distilled> {
    ensure_same_dims("left vs mask", left.dims(), mask.dims())?;
    let key = base_key(sample_id);
    let base = infer_stereo(stereo_backend, left, right, &key)?;
    let strategy = Strategy::StereoMerged;

    if mask.count_tom() == 0 {
        return Ok(Distilled {
            map: base,
            provenance: provenance(sample_id, cfg, strategy, None, vec![key], Space::DisparityPx),
        });
    }

    let mono = distill_mono(left, mask, sample_id, mono_backend, cfg)?;
    let mono_map = mono_in_disparity_frame(mono.map, calib)?;
    let (map, alignment, support) = merge_with_base(&base, &mono_map, mask)?;

    let mut keys = vec![key];
    keys.extend(mono.provenance.backend_keys);
    let mut prov = provenance(sample_id, cfg, strategy, None, keys, Space::DisparityPx);
    prov.palette = mono.provenance.palette;
    prov.alignment = Some(alignment);
    prov.alignment_support = Some(support);
    Ok(Distilled {
        map,
        provenance: prov,
    })
}

/// Virtual disparity: in-paints both views with the same color, the right
/// mask obtained by warping the left mask with ground-truth disparity, runs
/// the stereo backend per color and takes the per-pixel median.
pub fn distill_stereo_virtual_disparity(
    left: &RgbImage,
    right: &RgbImage,
    mask: &TomMask,
    gt_disp: &ScalarMap,
    sample_id: &str,
    stereo_backend: &BackendSpec,
    cfg: &DistillConfig,
) -> Result<Distilled> {
    ensure_same_dims("left vs mask", left.dims(), mask.dims())?;
    ensure_same_dims("left vs right", left.dims(), right.dims())?;
    let strategy = Strategy::StereoVirtualDisparity;

    if mask.count_tom() == 0 {
        let key = base_key(sample_id);
        let map = infer_stereo(stereo_backend, left, right, &key)?;
        return Ok(Distilled {
            map,
            provenance: provenance(sample_id, cfg, strategy, None, vec![key], Space::DisparityPx),
        });
    }

    let warped = warp_mask_left_to_right(mask, gt_disp)?;
    let palette = sample_palette(cfg.seed, sample_id, cfg.num_colors)?;
    let mut maps = Vec::with_capacity(palette.len());
    let mut keys = Vec::with_capacity(palette.len());
    for (i, &color) in palette.colors.iter().enumerate() {
        let key = color_key(sample_id, i);
        let l = inpaint(left, mask, color)?;
        let r = inpaint(right, &warped.mask, color)?;
        let map = infer_stereo(stereo_backend, &l, &r, &key)
            .map_err(|e| e.context(&format!("color {i} {:?}", color.to_array())))?;
        maps.push(map);
        keys.push(key);
    }
    let map = median_aggregate(&maps).map_err(|e| e.context(sample_id))?;
    let mut prov = provenance(
        sample_id,
        cfg,
        strategy,
        Some(&palette),
        keys,
        Space::DisparityPx,
    );
    prov.warp_dropped_invalid = Some(warped.dropped_invalid);
    Ok(Distilled {
        map,
        provenance: prov,
    })
}
