use std::fmt::Write;

use super::{threshold_key, MetricReport, Split, BAD_TAUS, DELTA_THRESHOLDS};
use crate::raster::Space;

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub category: Split,
    pub method: String,
    /// `None` renders as `n/a` cells.
    pub report: Option<MetricReport>,
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}"))
}

/// Renders a Markdown table with one block per category (All, ToM, Other),
/// rows in input order within each block.
///
/// Depth columns: δ<1.25 … δ<1.05, MAE, Abs. Rel, RMSE.
/// Disparity columns: bad-2 … bad-8, MAE, RMSE.
pub fn render_table(rows: &[TableRow], space: Space) -> String {
    let unit = match space {
        Space::DepthMm => " (mm)",
        Space::DisparityPx => " (px)",
        Space::AffineInverseDepth => "",
    };
    let disparity = space == Space::DisparityPx;
    let mut header = vec!["Category".to_string(), "Method".to_string()];
    if disparity {
        header.extend(BAD_TAUS.iter().map(|t| format!("bad-{} (%)", threshold_key(*t))));
        header.push(format!("MAE{unit}"));
        header.push(format!("RMSE{unit}"));
    } else {
        header.extend(
            DELTA_THRESHOLDS
                .iter()
                .rev()
                .map(|t| format!("δ<{} (%)", threshold_key(*t))),
        );
        header.push(format!("MAE{unit}"));
        header.push("Abs. Rel".to_string());
        header.push(format!("RMSE{unit}"));
    }

    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(
        out,
        "|{}",
        header
            .iter()
            .enumerate()
            .map(|(i, _)| if i < 2 { "---|" } else { "---:|" })
            .collect::<String>()
    );
    for category in Split::ALL {
        for row in rows.iter().filter(|r| r.category == category) {
            let r = row.report.as_ref();
            let mut cells = vec![category.to_string(), row.method.clone()];
            if disparity {
                for t in BAD_TAUS {
                    cells.push(cell(r.and_then(|r| r.bad.get(&threshold_key(t)).copied())));
                }
                cells.push(cell(r.map(|r| r.mae)));
                cells.push(cell(r.map(|r| r.rmse)));
            } else {
                for t in DELTA_THRESHOLDS.iter().rev() {
                    cells.push(cell(r.and_then(|r| r.delta.get(&threshold_key(*t)).copied())));
                }
                cells.push(cell(r.map(|r| r.mae)));
                cells.push(cell(r.and_then(|r| r.abs_rel)));
                cells.push(cell(r.map(|r| r.rmse)));
            }
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn row(category: Split, method: &str, report: Option<MetricReport>) -> TableRow {
        TableRow {
            category,
            method: method.into(),
            report,
        }
    }

    #[test]
    fn disparity_layout() {
        let rep = MetricReport {
            split: Split::All,
            count: 10,
            delta: BTreeMap::new(),
            mae: 1.5,
            abs_rel: None,
            rmse: 2.25,
            bad: [("2", 17.42), ("4", 13.49), ("6", 11.59), ("8", 10.11)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        };
        let rows = vec![
            row(Split::Other, "Base", None),
            row(Split::All, "Base", Some(rep)),
            row(Split::Tom, "Base", None),
        ];
        let t = render_table(&rows, Space::DisparityPx);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(
            lines[0],
            "| Category | Method | bad-2 (%) | bad-4 (%) | bad-6 (%) | bad-8 (%) | MAE (px) | RMSE (px) |"
        );
        assert_eq!(lines[2], "| All | Base | 17.42 | 13.49 | 11.59 | 10.11 | 1.50 | 2.25 |");
        assert!(lines[3].starts_with("| ToM | Base | n/a"));
        assert!(lines[4].starts_with("| Other |"));
    }

    #[test]
    fn depth_layout_orders_thresholds_descending() {
        let t = render_table(&[], Space::DepthMm);
        assert!(t.starts_with(
            "| Category | Method | δ<1.25 (%) | δ<1.20 (%) | δ<1.15 (%) | δ<1.10 (%) | δ<1.05 (%) | MAE (mm) | Abs. Rel | RMSE (mm) |"
        ));
    }
}
