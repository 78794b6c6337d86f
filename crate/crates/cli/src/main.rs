//! Command-line front end: state construction from a JSON config, degree
//! reports, Poincaré-sphere variance maps, bright-beam dark-plane scans, and
//! the homodyne tomography pipeline.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical-validity error,
//! 4 i/o error.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "polarimetry", version, about = "Two-mode polarization degrees from Stokes moments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Ppm,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute P1, P2', P2 and the noise ellipsoid of the configured state.
    Degrees {
        #[arg(long)]
        config: PathBuf,
        /// Also write degrees.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projected-variance map over the Poincaré sphere (csv/json/ppm).
    SphereMap {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Restrict output to a single format (default: write all three).
        #[arg(long)]
        format: Option<OutputFormat>,
    },
    /// Dark-plane scan of the linearized bright-beam model.
    BrightScan {
        #[arg(long)]
        config: PathBuf,
        /// Write scan.csv into this directory (default: CSV to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate homodyne sampling, reconstruct both modes by maximum
    /// likelihood, and report the degrees of the reconstructed state.
    Tomo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Error carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// Core-library failures during computation are numerical-validity errors
/// unless they are i/o at heart.
fn numerical(e: polarimetry::Error) -> CliError {
    match e {
        polarimetry::Error::Io(io) => CliError::Io(io.to_string()),
        other => CliError::Numerical(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Degrees { config, out } => {
            let cfg = config::load(&config)?;
            commands::degrees(&cfg, out.as_deref())
        }
        Command::SphereMap {
            config,
            out,
            format,
        } => {
            let cfg = config::load(&config)?;
            commands::sphere_map(&cfg, &out, format)
        }
        Command::BrightScan { config, out } => {
            let cfg = config::load(&config)?;
            commands::bright_scan(&cfg, out.as_deref())
        }
        Command::Tomo { config, out, seed } => {
            let cfg = config::load(&config)?;
            commands::tomo(&cfg, &out, seed)
        }
    }
}
