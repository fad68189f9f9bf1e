//! `fishbit` command line: synthetic signals, window processing, logger
//! simulation, and validation analytics for tri-axial accelerometer
//! biologging.

// `!(x > 0)` is the NaN-rejecting form of `x <= 0`; input guards use it
// deliberately so non-finite values fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod csvio;
mod errors;
mod manifest;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;
use crate::errors::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "fishbit",
    version,
    about = "Accelerometer biologging toolkit: synthesize, process, simulate, analyze"
)]
struct Cli {
    /// TOML config file; its values override command-line flags.
    /// Defaults to $FISHBIT_CONFIG when that variable is set.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic accelerometer recording with ground truth.
    Synth(commands::synth::SynthArgs),
    /// Estimate respiration and activity per window from a raw CSV.
    Process(commands::process::ProcessArgs),
    /// Run the logger simulator over a deployment schedule.
    Simulate(commands::simulate::SimulateArgs),
    /// Build the respirometry / agreement / PLS-DA report for a protocol.
    Analyze(commands::analyze::AnalyzeArgs),
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let file_cfg = match config::resolve_config(cli.config.as_deref())? {
        Some((path, cfg)) => {
            eprintln!("using config {}", path.display());
            cfg
        }
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Synth(args) => commands::synth::run(args, &file_cfg),
        Command::Process(args) => commands::process::run(args, &file_cfg),
        Command::Simulate(args) => commands::simulate::run(args, &file_cfg),
        Command::Analyze(args) => commands::analyze::run(args, &file_cfg),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version and 2 for usage errors
            e.exit();
        }
    };
    if let Err(e) = dispatch(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
