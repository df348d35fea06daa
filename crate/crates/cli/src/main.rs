//! Command-line experiment runner for the smoothed GDA solvers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod problem;
mod session;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "smoothgda", version, about = "Run, compare and rate min-max solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write trace.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `output` field.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write residuals.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Run two configurations on the same problem and overlay their curves.
    Compare {
        #[arg(long)]
        config_a: PathBuf,
        #[arg(long)]
        config_b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the empirical rate over a set of seeds.
    Rate {
        #[arg(long)]
        config: PathBuf,
        /// Seed list such as `0-9` or `1,3,5`.
        #[arg(long)]
        seeds: String,
        /// Fit window `lo,hi` in iterations.
        #[arg(long)]
        window: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn out_dir(flag: Option<PathBuf>, config: &ExperimentConfig) -> Result<PathBuf, CliError> {
    flag.or_else(|| config.output.clone())
        .ok_or_else(|| CliError::Config("invalid field `output`: no output directory given".into()))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out, svg } => {
            let config = ExperimentConfig::load(&config)?;
            let out = out_dir(out, &config)?;
            commands::cmd_run(&config, &out, svg)
        }
        Command::Compare { config_a, config_b, out } => {
            let a = ExperimentConfig::load(&config_a)?;
            let b = ExperimentConfig::load(&config_b)?;
            commands::cmd_compare(&a, &b, &out)
        }
        Command::Rate { config, seeds, window, out } => {
            let config = ExperimentConfig::load(&config)?;
            let seeds = commands::parse_seeds(&seeds)?;
            let window = commands::parse_window(&window)?;
            commands::cmd_rate(&config, &seeds, window, &out)
        }
    }
}

fn main() -> ExitCode {
    // usage errors are configuration errors (exit 1), not clap's default 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
