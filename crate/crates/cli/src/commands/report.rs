use std::path::Path;
use std::process::ExitCode;

use tomdistill::formats::{write_atomic, write_rgb_png};
use tomdistill::metrics::{
    render_table, threshold_key, MetricReport, Split, TableRow, BAD_TAUS, DELTA_THRESHOLDS,
};
use tomdistill::Space;

use super::evaluate::AggregateFile;
use crate::args::ReportArgs;
use crate::plot::bar_chart;
use crate::runner::{ConfigError, EXIT_OK};

pub trait TableSource {
    fn method(&self) -> &str;
    fn report(&self, split: Split) -> Option<&MetricReport>;
}

type Metric = (String, Box<dyn Fn(&MetricReport) -> Option<f64>>);

fn metrics(space: Space) -> Vec<Metric> {
    let mut out: Vec<Metric> = Vec::new();
    if space == Space::DisparityPx {
        for t in BAD_TAUS {
            let k = threshold_key(t);
            out.push((
                format!("bad_{k}"),
                Box::new(move |r| r.bad.get(&k).copied()),
            ));
        }
    } else {
        for t in DELTA_THRESHOLDS {
            let k = threshold_key(t);
            out.push((
                format!("delta_{k}"),
                Box::new(move |r| r.delta.get(&k).copied()),
            ));
        }
        out.push(("abs_rel".into(), Box::new(|r| r.abs_rel)));
    }
    out.push(("mae".into(), Box::new(|r| Some(r.mae))));
    out.push(("rmse".into(), Box::new(|r| Some(r.rmse))));
    out
}

/// Writes `table.md` and, if asked, one bar chart per metric under `plots/`
/// with a bar group per split and a bar per method.
pub fn emit(
    out: &Path,
    space: Space,
    splits: &[Split],
    sources: &[&dyn TableSource],
    plot: bool,
) -> tomdistill::Result<()> {
    let mut rows = Vec::new();
    for &split in splits {
        for s in sources {
            rows.push(TableRow {
                category: split,
                method: s.method().to_owned(),
                report: s.report(split).cloned(),
            });
        }
    }
    write_atomic(&out.join("table.md"), render_table(&rows, space).as_bytes())?;

    if plot {
        let dir = out.join("plots");
        std::fs::create_dir_all(&dir).map_err(|e| tomdistill::Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        for (name, get) in metrics(space) {
            let groups: Vec<Vec<Option<f64>>> = splits
                .iter()
                .map(|&split| sources.iter().map(|s| s.report(split).and_then(&get)).collect())
                .collect();
            write_rgb_png(&bar_chart(&groups), &dir.join(format!("{name}.png")))?;
        }
    }
    Ok(())
}

pub fn run(args: &ReportArgs) -> Result<ExitCode, ConfigError> {
    let mut files = Vec::with_capacity(args.evals.len());
    for dir in &args.evals {
        let path = dir.join("aggregate.json");
        let text = std::fs::read_to_string(&path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let agg: AggregateFile = serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        files.push(agg);
    }
    let space = files[0].space;
    if let Some(f) = files.iter().find(|f| f.space != space) {
        return Err(ConfigError(format!(
            "method `{}` was evaluated in {} but `{}` in {space}",
            f.method, f.space, files[0].method
        )));
    }
    std::fs::create_dir_all(&args.out)?;
    let sources: Vec<&dyn TableSource> = files.iter().map(|f| f as &dyn TableSource).collect();
    emit(&args.out, space, &args.splits, &sources, args.plot)?;
    Ok(ExitCode::from(EXIT_OK))
}
