//! Pseudo-label distillation for transparent and mirror (ToM) surfaces.
//!
//! ToM pixels of an RGB image are in-painted with a few random uniform
//! colors, a monocular depth predictor is run on every augmented image and
//! the per-pixel median becomes a "virtual depth" label. For stereo data the
//! virtual depth is aligned by least squares to a stereo network's disparity
//! on the non-ToM pixels and merged into it. The [`metrics`] module
//! implements the evaluation protocol used to compare such labels and
//! predictions on All / ToM / Other pixel splits.

pub mod backend;
pub mod distill;
pub mod error;
pub mod formats;
pub mod geometry;
pub mod inpaint;
pub mod metrics;
pub mod raster;
pub mod resample;

pub use error::{Error, Result};
pub use geometry::{depth_to_disparity, disparity_to_depth, AffineAlignment, StereoCalibration};
pub use raster::{InpaintColor, RgbImage, ScalarMap, Space, TomMask};
pub use resample::{resize_quarter, QuarterResize};
