//! In-memory raster types.
//!
//! All rasters are row-major with the origin at the top-left pixel. They are
//! plain value objects: every operation in the crate returns a new raster
//! rather than mutating its input.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical interpretation of the values stored in a [`ScalarMap`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    /// Metric depth in millimeters, strictly positive where valid.
    DepthMm,
    /// Horizontal disparity in pixels, non-negative where valid.
    DisparityPx,
    /// Inverse depth known only up to an unknown scale and shift.
    AffineInverseDepth,
}

impl Space {
    pub fn as_str(self) -> &'static str {
        match self {
            Space::DepthMm => "depth_mm",
            Space::DisparityPx => "disparity_px",
            Space::AffineInverseDepth => "affine_inverse_depth",
        }
    }

    /// Whether `v` is a physically meaningful value in this space.
    pub fn admits(self, v: f64) -> bool {
        v.is_finite()
            && match self {
                Space::DepthMm => v > 0.0,
                Space::DisparityPx => v >= 0.0,
                Space::AffineInverseDepth => true,
            }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Space {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "depth_mm" => Ok(Space::DepthMm),
            "disparity_px" => Ok(Space::DisparityPx),
            "affine_inverse_depth" => Ok(Space::AffineInverseDepth),
            other => Err(format!(
                "unknown space `{other}` (expected depth_mm, disparity_px or affine_inverse_depth)"
            )),
        }
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Dimension(format!(
            "raster dimensions must be positive, got {width}x{height}"
        )));
    }
    Ok(())
}

fn check_len(what: &str, len: usize, expected: usize) -> Result<()> {
    if len != expected {
        return Err(Error::Dimension(format!(
            "{what} has {len} elements, expected {expected}"
        )));
    }
    Ok(())
}

/// An 8-bit color used to in-paint masked pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InpaintColor {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl InpaintColor {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        InpaintColor { r, g, b }
    }

    pub const fn gray(v: u8) -> Self {
        InpaintColor { r: v, g: v, b: v }
    }

    pub fn to_array(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }
}

/// 8-bit RGB image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        check_len("RGB data", data.len(), width * height * 3)?;
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, color: InpaintColor) -> Result<Self> {
        check_dims(width, height)?;
        let data = color.to_array().repeat(width * height);
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Binary transparent-or-mirror segmentation: 1 marks a ToM pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TomMask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl TomMask {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        check_len("mask data", data.len(), width * height)?;
        if let Some(bad) = data.iter().find(|&&v| v > 1) {
            return Err(Error::Domain(format!(
                "mask values must be 0 or 1, found {bad}"
            )));
        }
        Ok(TomMask {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        check_dims(width, height)?;
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| u8::from(f(x, y)))
            .collect();
        Ok(TomMask {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::from_fn(width, height, |_, _| false)
    }

    pub fn ones(width: usize, height: usize) -> Result<Self> {
        Self::from_fn(width, height, |_, _| true)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn is_tom(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x] == 1
    }

    pub fn count_tom(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }
}

/// Per-pixel float field with an explicit validity plane and unit tag.
///
/// Values at invalid pixels carry no meaning and may be non-finite; equality
/// ignores them.
#[derive(Clone, Debug)]
pub struct ScalarMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    valid: Vec<bool>,
    space: Space,
}

impl PartialEq for ScalarMap {
    fn eq(&self, other: &Self) -> bool {
        self.dims() == other.dims()
            && self.space == other.space
            && self.valid == other.valid
            && self
                .values
                .iter()
                .zip(&other.values)
                .zip(&self.valid)
                .all(|((a, b), &ok)| !ok || a == b)
    }
}

impl ScalarMap {
    /// Builds a map, rejecting any valid pixel whose value is not admissible
    /// in `space`.
    pub fn new(
        width: usize,
        height: usize,
        values: Vec<f64>,
        valid: Vec<bool>,
        space: Space,
    ) -> Result<Self> {
        check_dims(width, height)?;
        check_len("map values", values.len(), width * height)?;
        check_len("validity plane", valid.len(), width * height)?;
        if let Some(i) = (0..values.len()).find(|&i| valid[i] && !space.admits(values[i])) {
            return Err(Error::Domain(format!(
                "value {} at pixel ({}, {}) is not admissible in {space}",
                values[i],
                i % width,
                i / width
            )));
        }
        Ok(ScalarMap {
            width,
            height,
            values,
            valid,
            space,
        })
    }

    /// Builds a map from raw values, marking every pixel that is flagged
    /// invalid or not admissible in `space` as invalid.
    pub fn sanitized(
        width: usize,
        height: usize,
        values: Vec<f64>,
        valid: Option<Vec<bool>>,
        space: Space,
    ) -> Result<Self> {
        check_dims(width, height)?;
        check_len("map values", values.len(), width * height)?;
        let mut valid = valid.unwrap_or_else(|| vec![true; values.len()]);
        check_len("validity plane", valid.len(), width * height)?;
        for (ok, &v) in valid.iter_mut().zip(&values) {
            *ok = *ok && space.admits(v);
        }
        Ok(ScalarMap {
            width,
            height,
            values,
            valid,
            space,
        })
    }

    /// A fully valid map with every pixel set to `value`.
    pub fn constant(width: usize, height: usize, value: f64, space: Space) -> Result<Self> {
        Self::new(
            width,
            height,
            vec![value; width * height],
            vec![true; width * height],
            space,
        )
    }

    /// A fully valid map computed per pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        space: Space,
        f: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let values = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, values, vec![true; width * height], space)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x]
    }

    /// The value at `(x, y)` if the pixel is valid.
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        let i = y * self.width + x;
        self.valid[i].then_some(self.values[i])
    }

    pub fn count_valid(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Reinterprets the map in another space, invalidating pixels that are
    /// not admissible there.
    pub fn with_space(self, space: Space) -> ScalarMap {
        let mut valid = self.valid;
        for (ok, &v) in valid.iter_mut().zip(&self.values) {
            *ok = *ok && space.admits(v);
        }
        ScalarMap {
            width: self.width,
            height: self.height,
            values: self.values,
            valid,
            space,
        }
    }

    pub fn into_parts(self) -> (usize, usize, Vec<f64>, Vec<bool>, Space) {
        (self.width, self.height, self.values, self.valid, self.space)
    }
}

/// Checks that two rasters share dimensions.
pub fn ensure_same_dims(what: &str, a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!(
            "{what}: {}x{} vs {}x{}",
            a.0, a.1, b.0, b.1
        )));
    }
    Ok(())
}
