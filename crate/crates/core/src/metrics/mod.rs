//! Depth and disparity accuracy metrics with All / ToM / Other splits.
//!
//! Conventions: a pixel is δ-accurate when `max(pred/gt, gt/pred) < t`
//! (strict) and bad when `|pred - gt| > tau` (strict). Evaluated pixels are
//! those valid in both maps and selected by the split mask.

mod aggregate;
mod table;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate_reports, Weighting};
pub use table::{render_table, TableRow};

use crate::distill::{apply_affine, fit_affine_lse};
use crate::error::{Error, Result};
use crate::geometry::AffineAlignment;
use crate::raster::{ensure_same_dims, ScalarMap, Space, TomMask};
use crate::resample::QuarterResize;

pub const DELTA_THRESHOLDS: [f64; 5] = [1.05, 1.10, 1.15, 1.20, 1.25];
pub const BAD_TAUS: [f64; 4] = [2.0, 4.0, 6.0, 8.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Split {
    All,
    #[serde(rename = "ToM")]
    Tom,
    Other,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::All, Split::Tom, Split::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::All => "All",
            Split::Tom => "ToM",
            Split::Other => "Other",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Split::All),
            "tom" => Ok(Split::Tom),
            "other" => Ok(Split::Other),
            other => Err(format!("unknown split `{other}` (expected all, tom or other)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rescale {
    Lse,
    None,
}

impl FromStr for Rescale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lse" => Ok(Rescale::Lse),
            "none" => Ok(Rescale::None),
            other => Err(format!("unknown rescale mode `{other}` (expected lse or none)")),
        }
    }
}

/// Formats a threshold as a stable map key, e.g. `1.05` or `2`.
pub fn threshold_key(t: f64) -> String {
    if t.fract() == 0.0 {
        format!("{t:.0}")
    } else {
        format!("{t:.2}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub split: Split,
    /// Number of evaluated pixels.
    pub count: usize,
    /// δ-accuracy percentage per threshold (depth-like spaces only).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub delta: BTreeMap<String, f64>,
    pub mae: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_rel: Option<f64>,
    pub rmse: f64,
    /// bad-τ percentage per τ in pixels (disparity only).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bad: BTreeMap<String, f64>,
}

fn evaluated(pred: &ScalarMap, gt: &ScalarMap, split_mask: &[bool]) -> Result<Vec<usize>> {
    ensure_same_dims("pred vs gt", pred.dims(), gt.dims())?;
    if split_mask.len() != gt.len() {
        return Err(Error::Dimension(format!(
            "split mask has {} entries, expected {}",
            split_mask.len(),
            gt.len()
        )));
    }
    if pred.space() != gt.space() {
        return Err(Error::Domain(format!(
            "pred is {} but gt is {}",
            pred.space(),
            gt.space()
        )));
    }
    let idx: Vec<usize> = (0..gt.len())
        .filter(|&i| split_mask[i] && pred.valid()[i] && gt.valid()[i])
        .collect();
    if idx.is_empty() {
        return Err(Error::EmptySplit);
    }
    Ok(idx)
}

fn percent(hits: usize, total: usize) -> f64 {
    100.0 * hits as f64 / total as f64
}

/// Percentage of evaluated pixels with `max(pred/gt, gt/pred) < threshold`.
pub fn delta_accuracy(
    pred: &ScalarMap,
    gt: &ScalarMap,
    split_mask: &[bool],
    threshold: f64,
) -> Result<f64> {
    let idx = evaluated(pred, gt, split_mask)?;
    let (p, g) = (pred.values(), gt.values());
    let mut hits = 0;
    for &i in &idx {
        if p[i] <= 0.0 || g[i] <= 0.0 {
            return Err(Error::Domain(format!(
                "δ needs positive values, got pred={} gt={} at pixel {i}",
                p[i], g[i]
            )));
        }
        if (p[i] / g[i]).max(g[i] / p[i]) < threshold {
            hits += 1;
        }
    }
    Ok(percent(hits, idx.len()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorMetrics {
    pub mae: f64,
    /// `None` when some evaluated ground truth is not positive.
    pub abs_rel: Option<f64>,
    pub rmse: f64,
    pub count: usize,
}

pub fn error_metrics(pred: &ScalarMap, gt: &ScalarMap, split_mask: &[bool]) -> Result<ErrorMetrics> {
    let idx = evaluated(pred, gt, split_mask)?;
    let (p, g) = (pred.values(), gt.values());
    let n = idx.len() as f64;
    let (mut abs, mut rel, mut sq) = (0.0f64, 0.0f64, 0.0f64);
    let mut rel_defined = true;
    for &i in &idx {
        let e = p[i] - g[i];
        abs += e.abs();
        sq += e * e;
        if g[i] > 0.0 {
            rel += e.abs() / g[i];
        } else {
            rel_defined = false;
        }
    }
    Ok(ErrorMetrics {
        mae: abs / n,
        abs_rel: rel_defined.then(|| rel / n),
        rmse: (sq / n).sqrt(),
        count: idx.len(),
    })
}

/// Percentage of evaluated pixels with `|pred - gt| > tau`.
pub fn bad_tau(pred: &ScalarMap, gt: &ScalarMap, split_mask: &[bool], tau: f64) -> Result<f64> {
    if gt.space() != Space::DisparityPx {
        return Err(Error::Domain(format!(
            "bad-τ is defined on disparity_px, got {}",
            gt.space()
        )));
    }
    let idx = evaluated(pred, gt, split_mask)?;
    let (p, g) = (pred.values(), gt.values());
    let hits = idx.iter().filter(|&&i| (p[i] - g[i]).abs() > tau).count();
    Ok(percent(hits, idx.len()))
}

/// Rescales `pred` onto `gt` with a least-squares scale and shift fitted on
/// every pixel valid in both.
pub fn eval_rescale(pred: &ScalarMap, gt: &ScalarMap) -> Result<(ScalarMap, AffineAlignment)> {
    let all = vec![true; gt.len()];
    let a = fit_affine_lse(pred, gt, &all)?;
    Ok((apply_affine(pred, a, gt.space()), a))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub rescale: Rescale,
    /// Space both maps are compared in; must match the ground truth.
    pub space: Space,
    pub quarter_resolution: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitOutcome {
    Report(MetricReport),
    /// The split could not be evaluated, e.g. because it is empty.
    Unavailable { split: Split, reason: String },
}

impl SplitOutcome {
    pub fn split(&self) -> Split {
        match self {
            SplitOutcome::Report(r) => r.split,
            SplitOutcome::Unavailable { split, .. } => *split,
        }
    }

    pub fn report(&self) -> Option<&MetricReport> {
        match self {
            SplitOutcome::Report(r) => Some(r),
            SplitOutcome::Unavailable { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleEvaluation {
    pub splits: Vec<SplitOutcome>,
    pub alignment: Option<AffineAlignment>,
}

impl SampleEvaluation {
    pub fn get(&self, split: Split) -> Option<&MetricReport> {
        self.splits
            .iter()
            .find(|o| o.split() == split)
            .and_then(SplitOutcome::report)
    }
}

fn split_mask(gt: &ScalarMap, mask: &TomMask, split: Split) -> Vec<bool> {
    mask.data()
        .iter()
        .zip(gt.valid())
        .map(|(&m, &ok)| {
            ok && match split {
                Split::All => true,
                Split::Tom => m == 1,
                Split::Other => m == 0,
            }
        })
        .collect()
}

fn report_for(pred: &ScalarMap, gt: &ScalarMap, sel: &[bool], split: Split) -> Result<MetricReport> {
    let err = error_metrics(pred, gt, sel)?;
    let mut report = MetricReport {
        split,
        count: err.count,
        delta: BTreeMap::new(),
        mae: err.mae,
        abs_rel: err.abs_rel,
        rmse: err.rmse,
        bad: BTreeMap::new(),
    };
    if gt.space() == Space::DisparityPx {
        for tau in BAD_TAUS {
            report.bad.insert(threshold_key(tau), bad_tau(pred, gt, sel, tau)?);
        }
    } else {
        for t in DELTA_THRESHOLDS {
            report
                .delta
                .insert(threshold_key(t), delta_accuracy(pred, gt, sel, t)?);
        }
    }
    Ok(report)
}

/// Evaluates one prediction against ground truth on each of the three
/// splits. With [`Rescale::Lse`] the prediction is first aligned on all
/// valid pixels, whichever split is reported. A split that cannot be
/// evaluated is recorded as unavailable without affecting the others.
pub fn evaluate_sample(
    pred: &ScalarMap,
    gt: &ScalarMap,
    tom_mask: &TomMask,
    options: &EvalOptions,
) -> Result<SampleEvaluation> {
    ensure_same_dims("pred vs gt", pred.dims(), gt.dims())?;
    ensure_same_dims("mask vs gt", tom_mask.dims(), gt.dims())?;
    if gt.space() != options.space {
        return Err(Error::Domain(format!(
            "ground truth is {} but evaluation space is {}",
            gt.space(),
            options.space
        )));
    }
    let (pred, gt, mask) = if options.quarter_resolution {
        (pred.resize_quarter()?, gt.resize_quarter()?, tom_mask.resize_quarter()?)
    } else {
        (pred.clone(), gt.clone(), tom_mask.clone())
    };

    let (pred, alignment) = match options.rescale {
        Rescale::Lse => {
            let (p, a) = eval_rescale(&pred, &gt)?;
            (p, Some(a))
        }
        Rescale::None => {
            if pred.space() != gt.space() {
                return Err(Error::Domain(format!(
                    "prediction is {} but ground truth is {}; use LSE rescaling or convert",
                    pred.space(),
                    gt.space()
                )));
            }
            (pred, None)
        }
    };

    let splits = Split::ALL
        .iter()
        .map(|&split| {
            let sel = split_mask(&gt, &mask, split);
            match report_for(&pred, &gt, &sel, split) {
                Ok(r) => SplitOutcome::Report(r),
                Err(e) => SplitOutcome::Unavailable {
                    split,
                    reason: e.to_string(),
                },
            }
        })
        .collect();
    Ok(SampleEvaluation { splits, alignment })
}
