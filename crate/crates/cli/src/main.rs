//! `crosstalk`: config-driven pipeline for drive-crosstalk simulation,
//! Hamiltonian learning and reporting on synthetic transmon chips.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical
//! failure.

use crosstalk_cli::{error, ops};

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "crosstalk", version, about = "Transmon drive-crosstalk simulation, learning and reporting")]
struct Cli {
    /// Run configuration file (JSON). Missing fields take built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config file (default "out").
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a chip ground-truth file from the generate block.
    GenerateChip,
    /// Run the pairwise phase-sweep protocol and fit every directed pair.
    Characterize {
        /// Restrict to listed directed pairs, e.g. "1:0,1:2".
        #[arg(long)]
        pairs: Option<String>,
    },
    /// Refit crosstalk parameters from recorded dataset files.
    Fit {
        /// Directory holding dataset_*.json files (default: output dir).
        #[arg(long)]
        datasets: Option<PathBuf>,
    },
    /// Predict a multiplet curve from the pairwise fit report.
    Predict {
        #[arg(long)]
        primary: usize,
        /// Comma-separated secondary qubits, e.g. "1,2,3".
        #[arg(long, value_delimiter = ',', required = true)]
        secondaries: Vec<usize>,
    },
    /// Simulate multiplet experiments and score zero-parameter predictions.
    Verify {
        /// Explicit multiplets "a:b,c;d:e,f". Mutually exclusive with --random.
        #[arg(long)]
        multiplets: Option<String>,
        /// Number of randomly drawn multiplets (default 40 when --multiplets
        /// is absent).
        #[arg(long)]
        random: Option<usize>,
        /// Secondaries per random multiplet (2 or 3); random mix when absent.
        #[arg(long)]
        size: Option<usize>,
    },
    /// Export the crosstalk graph (DOT + structured) and summary statistics.
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> error::AppResult<()> {
        let resolved = ops::resolve(
            cli.config.as_deref(),
            cli.seed,
            cli.output_dir.as_deref(),
        )?;
        match &cli.command {
            Command::GenerateChip => ops::cmd_generate_chip(&resolved),
            Command::Characterize { pairs } => ops::cmd_characterize(&resolved, pairs.as_deref()),
            Command::Fit { datasets } => ops::cmd_fit(&resolved, datasets.as_deref()),
            Command::Predict { primary, secondaries } => {
                ops::cmd_predict(&resolved, *primary, secondaries)
            }
            Command::Verify { multiplets, random, size } => {
                ops::cmd_verify(&resolved, multiplets.as_deref(), *random, *size)
            }
            Command::Report => ops::cmd_report(&resolved),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
