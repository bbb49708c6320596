//! Command-line front end: scenario configuration, sweeps, optimization,
//! fluctuation analysis, external gain-table ingestion, and the validation
//! suites. The binary is `tfqkd`; this library holds the argument/config
//! plumbing so tests and fuzz targets can drive it directly.

pub mod commands;
pub mod config;
pub mod output;

use clap::{Parser, Subcommand};

/// Exit codes: 0 success, 1 numerical failure, 2 usage/input errors.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<tfqkd_core::Error> for CliError {
    fn from(e: tfqkd_core::Error) -> Self {
        // errors surfacing from the numerical core during a computation
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io error: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tfqkd",
    about = "Asymptotic secret-key rates for twin-field QKD with analytical decoy-state bounds",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the optimized key rate over a loss grid and write a CSV.
    Sweep(config::SweepArgs),
    /// Optimize the key rate at a single loss point and emit JSON.
    Optimize(config::OptimizeArgs),
    /// Worst-case rates under intensity fluctuations over a loss grid (CSV).
    Fluctuate(config::FluctuateArgs),
    /// Compute yield bounds from an external gain-table CSV (JSON out).
    Bounds(config::BoundsArgs),
    /// Simulate channel-model gain tables and write them as CSV.
    Simulate(config::SimulateArgs),
    /// Run the numerical validation suites and report pass/fail.
    Validate(config::ValidateArgs),
}

/// Dispatch a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Sweep(args) => commands::sweep(args),
        Command::Optimize(args) => commands::optimize(args),
        Command::Fluctuate(args) => commands::fluctuate(args),
        Command::Bounds(args) => commands::bounds(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Validate(args) => commands::validate(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("tfqkd: {}", e.message());
            e.exit_code()
        }
    }
}

/// Worker-thread cap: the smaller of the requested count and the
/// TFQKD_THREADS environment variable (when set), defaulting to the
/// available parallelism.
pub fn thread_cap(requested: Option<usize>) -> usize {
    let default = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let wanted = requested.unwrap_or(default).max(1);
    match std::env::var("TFQKD_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(cap) if cap >= 1 => wanted.min(cap),
            _ => wanted,
        },
        Err(_) => wanted,
    }
}
