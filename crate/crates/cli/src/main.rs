//! `swegsa` command-line interface.

mod analyze;
mod error;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Parser)]
#[command(name = "swegsa", version, about = "Flood simulation ensembles and Sobol sensitivity analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum IndexOrder {
    First,
    Total,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write wse_max/hmax rasters and the volume series.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw the pick-freeze design of a study.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute every run of a design, recording results in a store directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        design: PathBuf,
        /// Store directory for records, maps and results.csv.
        #[arg(long)]
        out: PathBuf,
        /// Concurrent simulations; falls back to SWEGSA_WORKERS, then the config.
        #[arg(long, env = "SWEGSA_WORKERS")]
        workers: Option<usize>,
        /// Skip runs already completed in the store.
        #[arg(long)]
        resume: bool,
    },
    /// Sobol indices, convergence, histograms and scatter tables for every output.
    Analyze {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Depth above which a map cell counts as wet.
        #[arg(long, default_value_t = 1e-3)]
        wet_threshold: f64,
    },
    /// Write one Sobol index raster for one parameter.
    Map {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, value_enum)]
        order: IndexOrder,
        #[arg(long)]
        out: PathBuf,
        /// Map output to use when the store holds several.
        #[arg(long)]
        probe: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        wet_threshold: f64,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out } => simulate::simulate(&config, &out),
        Command::Sample { config, out } => analyze::sample(&config, &out),
        Command::Run { config, design, out, workers, resume } => analyze::run(&config, &design, &out, workers, resume),
        Command::Analyze { results, design, out, resamples, seed, bins, wet_threshold } => {
            analyze::analyze(&results, &design, &out, resamples, seed, bins, wet_threshold)
        }
        Command::Map { results, design, param, order, out, probe, wet_threshold } => {
            analyze::map(&results, &design, &param, order, &out, probe.as_deref(), wet_threshold)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
