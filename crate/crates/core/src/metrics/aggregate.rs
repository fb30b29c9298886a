use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MetricReport;

/// How per-sample reports are combined into a dataset figure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Every evaluated pixel counts once. Rates and mean errors are
    /// count-weighted means and RMSE is pooled over all pixels.
    #[default]
    Pixel,
    /// Every sample counts once: plain mean of the per-sample metrics.
    Image,
}

impl FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pixel" => Ok(Weighting::Pixel),
            "image" => Ok(Weighting::Image),
            other => Err(format!("unknown weighting `{other}` (expected pixel or image)")),
        }
    }
}

fn merge_maps<'a>(
    reports: &[&'a MetricReport],
    weights: &[f64],
    get: impl Fn(&'a MetricReport) -> &'a BTreeMap<String, f64>,
) -> BTreeMap<String, f64> {
    let total: f64 = weights.iter().sum();
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    for (r, w) in reports.iter().zip(weights) {
        for (k, v) in get(r) {
            *out.entry(k.clone()).or_default() += w * v;
        }
    }
    out.values_mut().for_each(|v| *v /= total);
    out
}

/// Combines reports of one split. Returns `None` for an empty input.
pub fn aggregate_reports(reports: &[&MetricReport], weighting: Weighting) -> Option<MetricReport> {
    let first = reports.first()?;
    let weights: Vec<f64> = match weighting {
        Weighting::Pixel => reports.iter().map(|r| r.count as f64).collect(),
        Weighting::Image => vec![1.0; reports.len()],
    };
    let total: f64 = weights.iter().sum();
    let wmean = |f: &dyn Fn(&MetricReport) -> f64| -> f64 {
        reports.iter().zip(&weights).map(|(r, w)| w * f(r)).sum::<f64>() / total
    };

    let abs_rel = if reports.iter().all(|r| r.abs_rel.is_some()) {
        Some(wmean(&|r| r.abs_rel.unwrap_or_default()))
    } else {
        None
    };
    let rmse = match weighting {
        Weighting::Pixel => wmean(&|r| r.rmse * r.rmse).sqrt(),
        Weighting::Image => wmean(&|r| r.rmse),
    };
    Some(MetricReport {
        split: first.split,
        count: reports.iter().map(|r| r.count).sum(),
        delta: merge_maps(reports, &weights, |r| &r.delta),
        mae: wmean(&|r| r.mae),
        abs_rel,
        rmse,
        bad: merge_maps(reports, &weights, |r| &r.bad),
    })
}
