//! Command-line front end.
//!
//! Subcommands: `simulate`, `estimate`, `check`, `forecast`, `tables`.
//! Every command prints a JSON run report to stdout; commands that write
//! files resolve relative output paths against `FBMCAST_OUTPUT_DIR` when
//! that variable is set.
//!
//! Exit codes: 0 success, 2 validation error, 3 input parse error,
//! 4 numerical failure, 5 I/O error.

mod commands;
mod dataset;
mod report;
mod tables;

pub use dataset::{load_dataset, Dataset};
pub use report::RunReport;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;

/// Environment variable holding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "FBMCAST_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "fbmcast",
    version,
    about = "Simulate, estimate, test and forecast fractional-Brownian-motion time series"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate an exact fBm path and write it as index,value CSV
    Simulate(SimulateArgs),
    /// Estimate the Hurst exponent and volatility from a series file
    Estimate(EstimateArgs),
    /// Test whether the fBm model is adequate for a series file
    Check(CheckArgs),
    /// Forecast future values of a series file
    Forecast(ForecastArgs),
    /// Regenerate the Monte Carlo experiment tables
    Tables(TablesArgs),
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    /// Grid size: the path gets n increments and n + 1 rows
    #[arg(long)]
    pub n: usize,
    /// Hurst exponent in (0, 1)
    #[arg(long)]
    pub hurst: f64,
    /// Volatility (scale) of the simulated process
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// RNG seed; identical seeds give byte-identical output
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV path (a .report.json sidecar is written next to it)
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct EstimateArgs {
    /// Input CSV: one value column, or index,value; header optional
    #[arg(long)]
    pub input: PathBuf,
    /// Grid step of the Hurst search, in (0, 0.1]
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    /// Use the rounded constant 0.8 instead of sqrt(2/pi)
    #[arg(long)]
    pub compat_08: bool,
    /// Optional path for the (H, Q, |Q-1|) profile CSV
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Known Hurst exponent; estimated from the data when omitted
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Significance level of the test
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Bound on the deviation |A_n + 1.5| in the antipersistent regime
    #[arg(long, default_value_t = crate::adequacy::DEFAULT_BETA0)]
    pub beta0: f64,
    /// Grid step used when the Hurst exponent must be estimated first
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    #[arg(long)]
    pub compat_08: bool,
    /// Optional path for a copy of the JSON report
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ForecastMode {
    /// Conditional mean of the raw values (fBm value covariance)
    Values,
    /// Conditional mean of the increments (stationary correlation)
    Increments,
    /// Full transform pipeline: log, detrend, power transform, forecast
    Pipeline,
}

#[derive(Debug, clap::Args)]
pub struct ForecastArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Known Hurst exponent; estimated from the data when omitted
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Size m of the learning sample
    #[arg(long)]
    pub learning_size: usize,
    /// Number r of forecast steps
    #[arg(long)]
    pub horizon: usize,
    #[arg(long, value_enum, default_value_t = ForecastMode::Values)]
    pub mode: ForecastMode,
    /// Detrending window for pipeline mode
    #[arg(long, default_value_t = 100)]
    pub window_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    /// Significance level for the pipeline adequacy check
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = crate::adequacy::DEFAULT_BETA0)]
    pub beta0: f64,
    #[arg(long)]
    pub compat_08: bool,
    /// Optional path for the per-step forecast CSV
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct TablesArgs {
    /// Which experiment table to regenerate (1, 2 or 3)
    #[arg(long)]
    pub table: u32,
    /// Number of Monte Carlo seeds per cell
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// Base seed; cell i uses base + i
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory (falls back to FBMCAST_OUTPUT_DIR, then ".")
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub compat_08: bool,
}

/// Errors of the command layer, classified for exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// Stable exit code classes, documented in the README.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) => match e {
                Error::Factorization { .. } | Error::Estimation(_) => 4,
                Error::Pipeline { source, .. } => CliError::Lib((**source).clone()).exit_code(),
                _ => 2,
            },
            CliError::Parse { .. } => 3,
            CliError::Io { .. } => 5,
        }
    }
}

/// Parses the process arguments, runs the command, prints the report to
/// stdout and errors to stderr, and returns the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::Estimate(args) => commands::estimate(&args),
        Command::Check(args) => commands::check(&args),
        Command::Forecast(args) => commands::forecast(&args),
        Command::Tables(args) => commands::tables(&args),
    };
    match result {
        Ok(report) => {
            println!("{}", report.to_json());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Joins a relative path onto `FBMCAST_OUTPUT_DIR` when the variable is set.
pub(crate) fn resolve_output(path: &std::path::Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(path);
            }
        }
    }
    path.to_path_buf()
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

// Re-exported for integration tests and the examples.
pub use commands::{check, estimate, forecast, simulate, tables as tables_command};
