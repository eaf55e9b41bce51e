//! `fsde`: seeded, reproducible simulation of the skew equation
//! dx = σ(x) dB^H and its verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/config error,
//! 3 I/O error.

mod commands;
mod config;
mod svg;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fsde", version, about = "skew SDE driven by fractional Brownian motion")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Key=value config file; flags override its fields
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Hurst index of the driver, in [0.5, 1)
    #[arg(long, global = true)]
    hurst: Option<f64>,
    /// Skew level of the coefficient, in (0, 1)
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Initial condition
    #[arg(long, global = true)]
    x0: Option<f64>,
    /// Time horizon T
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Number of grid steps N
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Base random seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated mollification indices
    #[arg(long = "n-list", global = true, value_name = "N1,N2,...")]
    n_list: Option<String>,
    /// Driver synthesis method: cholesky or circulant
    #[arg(long, global = true)]
    generator: Option<String>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Holder exponent for the derivative-bound check, in (0, 1)
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Fractional order parameter for the derivative-bound check, in (0, 1)
    #[arg(long = "alpha-tilde", global = true)]
    alpha_tilde: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a fractional Brownian driver path (CSV + SVG)
    Fbm,
    /// Solve the equation along a seeded driver (CSV + SVG overlay)
    Simulate {
        /// Emit the full (H, alpha) figure grid instead of one panel
        #[arg(long)]
        grid: bool,
    },
    /// Mollified-scheme error study over the configured index list
    Converge,
    /// Run the verification suite; exit 0 iff every check passes
    Verify,
}

#[derive(Debug)]
pub enum AppError {
    /// Verification failure → exit 1.
    Check(String),
    /// Bad flags, config, or domain parameters → exit 2.
    Usage(String),
    /// Filesystem trouble → exit 3.
    Io(String),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Check(m) | AppError::Usage(m) | AppError::Io(m) => f.write_str(m),
        }
    }
}

impl From<fsde::Error> for AppError {
    // library errors are precondition violations, so they read as usage
    fn from(e: fsde::Error) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Check(_) => 1,
            AppError::Usage(_) => 2,
            AppError::Io(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = config::Flags {
        config: cli.config,
        hurst: cli.hurst,
        alpha: cli.alpha,
        x0: cli.x0,
        horizon: cli.horizon,
        steps: cli.steps,
        seed: cli.seed,
        n_list: cli.n_list,
        generator: cli.generator,
        out: cli.out,
        gamma: cli.gamma,
        alpha_tilde: cli.alpha_tilde,
    };
    let result = config::resolve(&flags).and_then(|cfg| match cli.cmd {
        Cmd::Fbm => commands::cmd_fbm(&cfg),
        Cmd::Simulate { grid } => commands::cmd_simulate(&cfg, grid),
        Cmd::Converge => commands::cmd_converge(&cfg),
        Cmd::Verify => commands::cmd_verify(&cfg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
