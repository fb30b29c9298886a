use std::collections::BTreeSet;
use std::process::ExitCode;

use serde::{Deserialize, Serialize};
use serde_json::json;
use tomdistill::formats::{read_pfm, write_atomic, EvalResolution};
use tomdistill::metrics::{
    aggregate_reports, evaluate_sample, EvalOptions, MetricReport, Rescale, SampleEvaluation, Split,
    Weighting,
};
use tomdistill::{Error, Space};

use super::report::{emit, TableSource};
use crate::args::{EvaluateArgs, ResolutionArg};
use crate::loaders;
use crate::runner::{self, ConfigError};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitAggregate {
    pub split: Split,
    /// `None` when no sample could be evaluated on this split.
    pub report: Option<MetricReport>,
}

/// Contents of `aggregate.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AggregateFile {
    pub method: String,
    pub space: Space,
    pub rescale: Rescale,
    pub resolution: EvalResolution,
    pub weighting: Weighting,
    pub samples_evaluated: usize,
    pub splits: Vec<SplitAggregate>,
}

impl TableSource for AggregateFile {
    fn method(&self) -> &str {
        &self.method
    }

    fn report(&self, split: Split) -> Option<&MetricReport> {
        self.splits
            .iter()
            .find(|s| s.split == split)
            .and_then(|s| s.report.as_ref())
    }
}

pub fn run(args: &EvaluateArgs) -> Result<ExitCode, ConfigError> {
    let manifest = runner::load(&args.run)?;
    let spaces: BTreeSet<&str> = manifest
        .samples
        .iter()
        .filter_map(|s| s.gt_space.map(|g| g.space().as_str()))
        .collect();
    let space: Space = match spaces.len() {
        0 => return Err(ConfigError("no sample in the manifest has ground truth".into())),
        1 => spaces.first().unwrap().parse()?,
        _ => {
            return Err(ConfigError(format!(
                "ground truth mixes spaces {spaces:?}; evaluate them separately"
            )))
        }
    };
    if !args.pred.is_dir() {
        return Err(ConfigError(format!(
            "prediction directory {} does not exist",
            args.pred.display()
        )));
    }
    let pred_space = args.pred_space.unwrap_or(match args.rescale {
        Rescale::Lse => Space::AffineInverseDepth,
        Rescale::None => space,
    });
    let resolution = match args.resolution {
        Some(ResolutionArg::Full) => EvalResolution::Full,
        Some(ResolutionArg::Quarter) => EvalResolution::Quarter,
        None => manifest.eval_resolution,
    };
    let weighting = if args.per_image {
        Weighting::Image
    } else {
        args.weighting
    };
    let options = EvalOptions {
        rescale: args.rescale,
        space,
        quarter_resolution: resolution == EvalResolution::Quarter,
    };

    let outcomes = runner::for_each_sample(
        &manifest.samples,
        args.run.workers,
        args.run.fail_fast,
        |sample| -> tomdistill::Result<SampleEvaluation> {
            let gt = loaders::gt(sample)?;
            let path = args.pred.join(format!("{}.pfm", sample.id));
            if !path.is_file() {
                return Err(Error::Manifest {
                    sample: Some(sample.id.clone()),
                    reason: format!("prediction {}.pfm not found", sample.id),
                });
            }
            let pred = read_pfm(&path, pred_space)?;
            let mask = loaders::mask_or_empty(&manifest, sample, gt.dims())?;
            evaluate_sample(&pred, &gt, &mask, &options)
        },
    )?;

    let mut lines = Vec::new();
    for o in &outcomes {
        let line = match &o.result {
            Ok(e) => json!({ "id": o.id, "alignment": e.alignment, "splits": e.splits }),
            Err(err) => json!({ "id": o.id, "error": err }),
        };
        lines.push(serde_json::to_string(&line).expect("JSON values always serialize"));
    }
    let mut jsonl = lines.join("\n");
    jsonl.push('\n');
    write_atomic(&args.run.out.join("per_sample.jsonl"), jsonl.as_bytes())?;

    let evaluated: Vec<&SampleEvaluation> = outcomes.iter().filter_map(|o| o.ok()).collect();
    let aggregate = AggregateFile {
        method: args.method.clone(),
        space,
        rescale: args.rescale,
        resolution,
        weighting,
        samples_evaluated: evaluated.len(),
        splits: args
            .splits
            .iter()
            .map(|&split| {
                let reports: Vec<&MetricReport> =
                    evaluated.iter().filter_map(|e| e.get(split)).collect();
                SplitAggregate {
                    split,
                    report: aggregate_reports(&reports, weighting),
                }
            })
            .collect(),
    };
    runner::write_json(&args.run.out.join("aggregate.json"), &aggregate)?;
    emit(&args.run.out, space, &args.splits, &[&aggregate], args.plot)?;

    let settings = json!({
        "method": args.method,
        "space": space,
        "pred_space": pred_space,
        "rescale": args.rescale,
        "resolution": resolution,
        "weighting": weighting,
        "splits": args.splits,
    });
    runner::finish(&args.run.out, "evaluate", settings, &outcomes, |_| {
        json!({ "record": "per_sample.jsonl" })
    })
}
