//! Closed-form least-squares scale/shift alignment.
//!
//! Minimizes `sum (scale * pred + shift - target)^2` over the selected
//! pixels using the centered normal equations:
//! `scale = cov(pred, target) / var(pred)`,
//! `shift = mean(target) - scale * mean(pred)`.

use crate::error::{Error, Result};
use crate::geometry::AffineAlignment;
use crate::raster::{ensure_same_dims, ScalarMap, Space};

/// Fits `target ~ scale * pred + shift` over pixels where `fit_mask`,
/// `pred.valid` and `target.valid` all hold.
pub fn fit_affine_lse(
    pred: &ScalarMap,
    target: &ScalarMap,
    fit_mask: &[bool],
) -> Result<AffineAlignment> {
    ensure_same_dims("alignment pred vs target", pred.dims(), target.dims())?;
    if fit_mask.len() != pred.len() {
        return Err(Error::Dimension(format!(
            "fit mask has {} entries, expected {}",
            fit_mask.len(),
            pred.len()
        )));
    }
    let (pv, tv) = (pred.values(), target.values());
    let selected = || {
        (0..pv.len()).filter(|&i| fit_mask[i] && pred.valid()[i] && target.valid()[i])
    };

    let mut n = 0usize;
    let (mut sum_p, mut sum_t, mut max_abs_p) = (0.0f64, 0.0f64, 0.0f64);
    for i in selected() {
        n += 1;
        sum_p += pv[i];
        sum_t += tv[i];
        max_abs_p = max_abs_p.max(pv[i].abs());
    }
    if n < 2 {
        return Err(Error::InsufficientSupport { usable: n });
    }
    let mean_p = sum_p / n as f64;
    let mean_t = sum_t / n as f64;

    let (mut var, mut cov, mut max_dev) = (0.0f64, 0.0f64, 0.0f64);
    for i in selected() {
        let dp = pv[i] - mean_p;
        var += dp * dp;
        cov += dp * (tv[i] - mean_t);
        max_dev = max_dev.max(dp.abs());
    }
    // deviations at rounding level of the mean mean a constant prediction
    if max_dev <= 8.0 * f64::EPSILON * max_abs_p || var == 0.0 {
        return Err(Error::DegenerateFit { usable: n });
    }
    let scale = cov / var;
    AffineAlignment::new(scale, mean_t - scale * mean_p)
}

/// Applies `scale * v + shift` to every valid pixel and retags the result
/// as `target_space`. Pixels whose aligned value is not admissible in the
/// target space (e.g. negative disparity) become invalid.
pub fn apply_affine(map: &ScalarMap, a: AffineAlignment, target_space: Space) -> ScalarMap {
    let values = map
        .values()
        .iter()
        .zip(map.valid())
        .map(|(&v, &ok)| if ok { a.apply(v) } else { v })
        .collect();
    ScalarMap::sanitized(
        map.width(),
        map.height(),
        values,
        Some(map.valid().to_vec()),
        target_space,
    )
    .expect("dimensions already validated")
}
