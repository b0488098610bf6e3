mod commands;
mod exit;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::exit::Failure;

/// Curvature invariants of Riemannian maps and submersions, and checks of
/// the Casorati inequalities they satisfy.
#[derive(Debug, Parser)]
#[command(name = "casorati", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance of the holds test.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Number of points checked on a catalog geometry; the first is the base point.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// JSON geometry description, addressable by its id.
    #[arg(long, global = true)]
    pub geometry_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog geometries.
    Catalog {
        /// Keep entries declared to feed this theorem.
        #[arg(long)]
        tag: Option<String>,
    },
    /// Frames, fundamental forms, Casorati curvatures and scalar curvatures at a point.
    Invariants {
        #[arg(long)]
        geometry: String,
        /// Comma-separated source coordinates; the base point when omitted.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Check theorems on a catalog geometry or on synthetic data.
    Verify {
        /// Theorem id, or `all`.
        #[arg(long, default_value = "all")]
        theorem: String,
        /// Catalog id, or `synthetic`.
        #[arg(long, default_value = "synthetic")]
        geometry: String,
        /// Synthetic trials per theorem.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Solve the constrained quadratic extremum problem.
    Extremum {
        #[arg(long)]
        r: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda1: f64,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { 0 };
            // help and version go to stdout, usage errors to stderr
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => match report::emit(&cli.global, &out) {
            Ok(()) => ExitCode::from(out.code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit::INTERNAL)
            }
        },
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
