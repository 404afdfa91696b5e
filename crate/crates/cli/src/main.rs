//! `qlw`: run quantum random walk experiments from the command line.
//!
//! Exit codes: 0 success, 1 failed validation or check, 2 config or I/O error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qlw_core::harness::ReportFormat;

#[derive(Debug, Parser)]
#[command(
    name = "qlw",
    version,
    about = "Quantum random walks on finite-dimensional C*-bialgebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the bialgebra axioms of a fixture file and print the residual table.
    Validate {
        fixture: PathBuf,
        #[arg(long, default_value_t = qlw_core::algebra::FIXTURE_TOL)]
        tol: f64,
    },
    /// Print the Markov semigroup P_t = exp(tγ) on every basis element.
    Semigroup {
        config: PathBuf,
        /// Comma-separated times.
        #[arg(
            long = "t",
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        times: Vec<f64>,
        #[command(flatten)]
        common: Overrides,
    },
    /// Print the vacuum walk states κ_0, …, κ_n for the `[walk]` table.
    Walk {
        config: PathBuf,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        common: Overrides,
    },
    /// Sweep the step size for every test case and fit the convergence order.
    Converge {
        config: PathBuf,
        #[command(flatten)]
        common: Overrides,
    },
    /// Measure the block deviations of the one-step homomorphism and fit their orders.
    BetaBounds {
        config: PathBuf,
        #[command(flatten)]
        common: Overrides,
    },
}

/// Flags overriding scalar config fields.
#[derive(Debug, Args)]
struct Overrides {
    /// RNG seed for norm estimates (overrides QLW_SEED and the config).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<ReportFormat>,
    /// Worker threads for sweeps.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Largest dense walk dimension.
    #[arg(long)]
    cap: Option<usize>,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: qlw_core::Error| e.to_string())
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// A validation or assertion failed (exit 1).
    Check(String),
    /// The config, a referenced file or an argument is unusable (exit 2).
    Config(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Validate { fixture, tol } => commands::validate(&fixture, tol),
        Command::Semigroup {
            config,
            times,
            common,
        } => commands::semigroup(&config, &times, &common),
        Command::Walk {
            config,
            h,
            steps,
            common,
        } => commands::walk(&config, h, steps, &common),
        Command::Converge { config, common } => commands::converge(&config, &common),
        Command::BetaBounds { config, common } => commands::beta_bounds(&config, &common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("qlw: check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("qlw: error: {e:#}");
            ExitCode::from(2)
        }
    }
}
