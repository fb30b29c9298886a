use std::path::Path;

use tomdistill::formats::{
    collapse_mask, read_class_png, read_pfm, read_png16_depth, read_rgb, DatasetManifest, GtSpace,
    SampleRecord,
};
use tomdistill::{depth_to_disparity, Error, Result, RgbImage, ScalarMap, Space, TomMask};

pub fn left(sample: &SampleRecord) -> Result<RgbImage> {
    read_rgb(&sample.left)
}

pub fn right(sample: &SampleRecord) -> Result<RgbImage> {
    match &sample.right {
        Some(p) => read_rgb(p),
        None => Err(Error::Manifest {
            sample: Some(sample.id.clone()),
            reason: "stereo strategy needs a right image".into(),
        }),
    }
}

pub fn mask(manifest: &DatasetManifest, sample: &SampleRecord) -> Result<TomMask> {
    match &sample.mask {
        Some(p) => collapse_mask(&read_class_png(p)?, &manifest.class_map),
        None => Err(Error::Manifest {
            sample: Some(sample.id.clone()),
            reason: "no ToM mask".into(),
        }),
    }
}

/// The mask if one is given, otherwise every pixel counts as Other.
pub fn mask_or_empty(
    manifest: &DatasetManifest,
    sample: &SampleRecord,
    dims: (usize, usize),
) -> Result<TomMask> {
    if sample.mask.is_some() {
        mask(manifest, sample)
    } else {
        TomMask::zeros(dims.0, dims.1)
    }
}

fn is_png(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

pub fn gt(sample: &SampleRecord) -> Result<ScalarMap> {
    let (Some(path), Some(space)) = (&sample.gt, sample.gt_space) else {
        return Err(Error::Manifest {
            sample: Some(sample.id.clone()),
            reason: "no ground truth".into(),
        });
    };
    match space {
        GtSpace::DepthMm if is_png(path) => read_png16_depth(path),
        _ => read_pfm(path, space.space()),
    }
}

/// Ground truth as disparity, triangulating depth when needed.
pub fn gt_disparity(manifest: &DatasetManifest, sample: &SampleRecord) -> Result<ScalarMap> {
    let gt = gt(sample)?;
    if gt.space() == Space::DisparityPx {
        return Ok(gt);
    }
    let calib = manifest.calibration_for(sample).ok_or_else(|| Error::Manifest {
        sample: Some(sample.id.clone()),
        reason: "depth ground truth needs a calibration to become disparity".into(),
    })?;
    depth_to_disparity(&gt, &calib)
}
