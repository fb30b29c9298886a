use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tomdistill::metrics::{Rescale, Split, Weighting};
use tomdistill::Space;

#[derive(Debug, Parser)]
#[command(name = "tomdistill", version, about = "Pseudo-label distillation and evaluation for transparent and mirror surfaces")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the in-painted images of every sample as PNG.
    Inpaint(InpaintArgs),
    /// Produce pseudo-labels.
    #[command(subcommand)]
    Distill(DistillCommand),
    /// Score predictions against ground truth.
    Evaluate(EvaluateArgs),
    /// Combine several evaluation outputs into one table.
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
pub enum DistillCommand {
    /// Median of monocular predictions over in-painted copies.
    Mono(MonoArgs),
    /// Stereo labels, merged with aligned monocular depth or from in-painted pairs.
    Stereo(StereoArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Dataset manifest (TOML).
    #[arg(long)]
    pub manifest: PathBuf,

    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,

    /// Samples processed concurrently.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,

    /// Abort at the first failing sample instead of collecting errors.
    #[arg(long)]
    pub fail_fast: bool,
}

#[derive(Debug, Args)]
pub struct PaletteArgs {
    /// In-painting colors per sample.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub colors: u32,

    /// Palette seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct InpaintArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub palette: PaletteArgs,
}

#[derive(Debug, Args)]
pub struct MonoArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub palette: PaletteArgs,

    /// Monocular backend: `dir:<path>` or `exec:<command template>`.
    #[arg(long)]
    pub backend: String,

    /// Space of the monocular backend output.
    #[arg(long, default_value = "affine_inverse_depth")]
    pub mono_space: Space,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum StereoStrategy {
    StereoMerged,
    StereoVirtualDisparity,
}

#[derive(Debug, Args)]
pub struct StereoArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub palette: PaletteArgs,

    #[arg(long, value_enum, default_value_t = StereoStrategy::StereoMerged)]
    pub strategy: StereoStrategy,

    /// Stereo backend, producing disparity in pixels.
    #[arg(long)]
    pub stereo_backend: String,

    /// Monocular backend; required by `stereo_merged`.
    #[arg(long)]
    pub mono_backend: Option<String>,

    /// Space of the monocular backend output.
    #[arg(long, default_value = "affine_inverse_depth")]
    pub mono_space: Space,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResolutionArg {
    Full,
    Quarter,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Directory holding one `<id>.pfm` prediction per sample.
    #[arg(long)]
    pub pred: PathBuf,

    /// Space of the predictions. Defaults to affine_inverse_depth with LSE
    /// rescaling and to the ground-truth space otherwise.
    #[arg(long)]
    pub pred_space: Option<Space>,

    #[arg(long, default_value = "lse")]
    pub rescale: Rescale,

    /// Overrides the manifest's evaluation resolution.
    #[arg(long, value_enum)]
    pub resolution: Option<ResolutionArg>,

    /// Splits reported in the table, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "all,tom,other")]
    pub splits: Vec<Split>,

    #[arg(long, default_value = "pixel")]
    pub weighting: Weighting,

    /// Shorthand for `--weighting image`.
    #[arg(long)]
    pub per_image: bool,

    /// Method name shown in the table.
    #[arg(long, default_value = "Prediction")]
    pub method: String,

    /// Also write bar charts of the aggregate metrics.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Output directories of earlier `evaluate` runs, one per method.
    #[arg(long = "eval", required = true)]
    pub evals: Vec<PathBuf>,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, value_delimiter = ',', default_value = "all,tom,other")]
    pub splits: Vec<Split>,

    #[arg(long)]
    pub plot: bool,
}
