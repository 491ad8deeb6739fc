//! `kahler`: batch front end for the kahler-core library.
//!
//! Every command reads JSON inputs (a file path, or inline JSON starting with
//! `{` or `[`), writes one report, and exits with
//! 0 on success, 1 on invalid input and 2 when a check fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kahler_core::Error;

#[derive(Parser, Debug)]
#[command(name = "kahler", version, about = "Kähler geometry of linear filters and geometric shrinkage priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kähler potential and its upper bound.
    Potential(Common),
    /// Metric, its checks, and a summary of the connection.
    Metric(Common),
    /// Ricci tensor and scalar curvature.
    Curvature(Common),
    /// Constant-gain test and closedness of the Kähler form.
    CheckKahler(CheckArgs),
    /// Superharmonicity scan of a prior over a grid.
    PriorScan(ScanArgs),
    /// Risk improvement, leading-order or by Monte Carlo.
    Risk(RiskArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Model file (or inline JSON).
    #[arg(long)]
    model: String,
    /// Point as JSON `[[re, im], ...]`; defaults to the point in the model file.
    #[arg(long)]
    point: Option<String>,
    #[arg(long, default_value_t = 4096)]
    truncation: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Seed for the random sample points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    samples: usize,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    common: Common,
    /// Prior file (or inline JSON).
    #[arg(long)]
    prior: String,
    /// Grid file (or inline JSON); defaults to the polar scan grid.
    #[arg(long)]
    grid: Option<String>,
    /// Also write the JSON summary here when `--format csv`.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RiskArgs {
    /// Model file; required for `--mode asymptotic`.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    point: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Asymptotic)]
    mode: Mode,
    /// Prior file; required for `--mode asymptotic`.
    #[arg(long)]
    prior: Option<String>,
    /// Sample size N for `--mode asymptotic`.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Experiment config for `--mode mc`.
    #[arg(long)]
    config: Option<String>,
    /// Overrides the seed in the experiment config.
    #[arg(long)]
    seed: Option<u64>,
    /// Posterior grid, overriding the experiment config.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Asymptotic,
    Mc,
}

/// What went wrong, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. }
            | Error::DimensionMismatch { .. }
            | Error::UnsupportedKind(_)
            | Error::InvalidPrior(_)
            | Error::InvalidConfig(_) => Failure::Input(e.to_string()),
            Error::NonKahler { .. }
            | Error::SingularMetric
            | Error::BoundViolation { .. }
            | Error::FiniteDifference(_)
            | Error::Numerical(_) => Failure::Check(e.to_string()),
        }
    }
}

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Passed,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Potential(args) => commands::potential(&args),
        Command::Metric(args) => commands::metric(&args),
        Command::Curvature(args) => commands::curvature(&args),
        Command::CheckKahler(args) => commands::check_kahler(&args),
        Command::PriorScan(args) => commands::prior_scan(&args),
        Command::Risk(args) => commands::risk(&args),
    };
    match result {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
    }
}
