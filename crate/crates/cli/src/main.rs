//! `tomdistill` command-line driver.
//!
//! Exit codes: 0 success, 1 some samples failed, 2 configuration error.

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod loaders;
mod plot;
mod runner;

use args::{Cli, Command, DistillCommand};
use runner::EXIT_CONFIG;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Inpaint(a) => commands::inpaint::run(a),
        Command::Distill(DistillCommand::Mono(a)) => commands::distill::mono(a),
        Command::Distill(DistillCommand::Stereo(a)) => commands::distill::stereo(a),
        Command::Evaluate(a) => commands::evaluate::run(a),
        Command::Report(a) => commands::report::run(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {}", e.0);
        ExitCode::from(EXIT_CONFIG)
    })
}
