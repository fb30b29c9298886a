//! Stereo rig reduced to focal length and baseline, plus the scale/shift pair
//! used to align affine-ambiguous predictions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{ScalarMap, Space};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StereoCalibration {
    /// Focal length in pixels.
    pub focal: f64,
    /// Baseline in millimeters.
    pub baseline: f64,
}

impl StereoCalibration {
    pub fn new(focal: f64, baseline: f64) -> Result<Self> {
        let calib = StereoCalibration { focal, baseline };
        calib.validate()?;
        Ok(calib)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal.is_finite() && self.focal > 0.0) {
            return Err(Error::Domain(format!("focal must be > 0, got {}", self.focal)));
        }
        if !(self.baseline.is_finite() && self.baseline > 0.0) {
            return Err(Error::Domain(format!(
                "baseline must be > 0, got {}",
                self.baseline
            )));
        }
        Ok(())
    }

    fn focal_baseline(&self) -> f64 {
        self.focal * self.baseline
    }
}

/// Scale and shift mapping a prediction onto a target: `scale * v + shift`.
///
/// A zero scale is representable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineAlignment {
    pub scale: f64,
    pub shift: f64,
}

impl AffineAlignment {
    pub const IDENTITY: AffineAlignment = AffineAlignment {
        scale: 1.0,
        shift: 0.0,
    };

    pub fn new(scale: f64, shift: f64) -> Result<Self> {
        if !(scale.is_finite() && shift.is_finite()) {
            return Err(Error::Domain(format!(
                "alignment must be finite, got scale={scale} shift={shift}"
            )));
        }
        Ok(AffineAlignment { scale, shift })
    }

    #[inline]
    pub fn apply(&self, v: f64) -> f64 {
        self.scale * v + self.shift
    }
}

/// Triangulates metric depth into disparity: `focal * baseline / depth`.
pub fn depth_to_disparity(depth: &ScalarMap, calib: &StereoCalibration) -> Result<ScalarMap> {
    if depth.space() != Space::DepthMm {
        return Err(Error::Domain(format!(
            "depth_to_disparity expects depth_mm, got {}",
            depth.space()
        )));
    }
    calib.validate()?;
    let fb = calib.focal_baseline();
    let mut values = depth.values().to_vec();
    for (i, v) in values.iter_mut().enumerate() {
        if !depth.valid()[i] {
            continue;
        }
        if *v <= 0.0 {
            return Err(Error::Domain(format!(
                "non-positive depth {v} at pixel {i}"
            )));
        }
        *v = fb / *v;
    }
    ScalarMap::new(
        depth.width(),
        depth.height(),
        values,
        depth.valid().to_vec(),
        Space::DisparityPx,
    )
}

/// Inverse of [`depth_to_disparity`]. Zero disparity (a point at infinity)
/// becomes an invalid pixel.
pub fn disparity_to_depth(disp: &ScalarMap, calib: &StereoCalibration) -> Result<ScalarMap> {
    if disp.space() != Space::DisparityPx {
        return Err(Error::Domain(format!(
            "disparity_to_depth expects disparity_px, got {}",
            disp.space()
        )));
    }
    calib.validate()?;
    let fb = calib.focal_baseline();
    let mut values = disp.values().to_vec();
    let mut valid = disp.valid().to_vec();
    for (v, ok) in values.iter_mut().zip(valid.iter_mut()) {
        if !*ok {
            continue;
        }
        if *v > 0.0 {
            *v = fb / *v;
        } else {
            *ok = false;
        }
    }
    ScalarMap::new(disp.width(), disp.height(), values, valid, Space::DepthMm)
}
