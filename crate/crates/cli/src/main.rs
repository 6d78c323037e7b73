use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use subrank_core::MERSENNE_61;

mod commands;

/// Generic subrank of tensors: closed forms, certificates and rank checks.
#[derive(Debug, Parser)]
#[command(name = "subrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generic subrank Q of a shape.
    Q {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Print a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Find and validate a crossing-out certificate.
    Certificate {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        r: usize,
        /// Where to write the certificate JSON (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check full row rank of random instantiations modulo a prime.
    Verify {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        rng: RngArgs,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// Dimension of the locus of tensors with subrank at least r.
    Dim {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        r: usize,
        /// Also compute the dimension as the rank of a spanning set.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        rng: RngArgs,
    },
    /// CSV table of Q(n) for cubic shapes n x n x n.
    Table {
        #[arg(long)]
        max: usize,
        /// Build, validate and rank-check a certificate for every row.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        rng: RngArgs,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the pattern matrix or a seeded instance of it.
    Export {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value_t = ExportFormat::CoordinateList)]
        format: ExportFormat,
        #[command(flatten)]
        rng: RngArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::Args)]
struct RngArgs {
    /// Prime modulus for random instantiation.
    #[arg(long, default_value_t = MERSENNE_61)]
    prime: u64,
    #[arg(long, env = "SUBRANK_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Json,
    CoordinateList,
    /// Coordinate list with seeded numeric values.
    Instantiated,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
