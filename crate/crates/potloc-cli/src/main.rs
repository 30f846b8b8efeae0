//! `potloc`: localize 2D potential sources from boundary observations.
//!
//! Three config-driven subcommands: `forward` synthesizes boundary data for
//! a set of disk sources, `solve` recovers a single-layer density on one
//! window, and `sweep` slides the window along x and reports the residual
//! and layer-mass curves used for localization.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 solver
//! non-convergence, 4 I/O failure.

mod config;
mod fail;
mod output;
mod runners;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::fail::CliError;

#[derive(Parser)]
#[command(
    name = "potloc",
    version,
    about = "Localize 2D potential sources from boundary observations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize boundary observations of the configured disk sources
    Forward(RunArgs),
    /// Recover a single-layer density on the configured window
    Solve(RunArgs),
    /// Slide the window along x and report residual and mass curves
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Write results here instead of the configured output_path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print progress information to stderr
    #[arg(short, long)]
    verbose: bool,
}

type Runner = fn(&ExperimentConfig, &Path, bool) -> Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, runner): (&RunArgs, Runner) = match &cli.command {
        Command::Forward(args) => (args, runners::run_forward),
        Command::Solve(args) => (args, runners::run_solve),
        Command::Sweep(args) => (args, runners::run_sweep),
    };
    match execute(args, runner) {
        Ok(out) => {
            println!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(args: &RunArgs, runner: Runner) -> Result<PathBuf, CliError> {
    let config = ExperimentConfig::load(&args.config)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| config.output_path.clone());
    runner(&config, &out, args.verbose)?;
    Ok(out)
}
