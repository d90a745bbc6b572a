//! `qdc` — experiment runner for dense coding in engineered coupled-cavity
//! arrays. Runs a declarative experiment config (or a built-in platform
//! preset) and writes a delimited result table.

mod config;
mod experiments;
mod presets;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_pairs, ExperimentConfig};
use experiments::RunError;

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_CONVERGENCE: u8 = 4;

#[derive(Parser)]
#[command(name = "qdc", version, about = "Dense coding in coupled-cavity arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a config file and/or preset.
    Run {
        /// Path to a `key = value` experiment config.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Built-in parameter set (photonic-crystal, superconducting);
        /// config-file keys override preset values.
        #[arg(long)]
        preset: Option<String>,
        /// Override the RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output path (default: `<experiment>.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            preset,
            seed,
            out,
        } => match run_command(config, preset, seed, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("qdc: {e}");
                ExitCode::from(e.exit_code())
            }
        },
    }
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
    Convergence(String),
    Other(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) | Self::Io(m) | Self::Convergence(m) | Self::Other(m) => {
                write!(f, "{m}")
            }
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Io(_) => EXIT_IO,
            Self::Convergence(_) => EXIT_CONVERGENCE,
            Self::Other(_) => 1,
        }
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => Self::Config(c.to_string()),
            RunError::Core(qdc_core::Error::ConvergenceFailure(m)) => Self::Convergence(m),
            RunError::Core(other) => Self::Other(other.to_string()),
        }
    }
}

fn run_command(
    config_path: Option<PathBuf>,
    preset_name: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let base = match &preset_name {
        Some(name) => Some(presets::preset(name).map_err(|e| CliError::Config(e.to_string()))?),
        None => None,
    };
    let mut config: ExperimentConfig = match (&config_path, base) {
        (Some(path), base) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            config::load(base, &text).map_err(|e| CliError::Config(e.to_string()))?
        }
        (None, Some(base)) => base,
        (None, None) => return Err(CliError::Config("need --config and/or --preset".into())),
    };
    if let Some(seed) = seed {
        config
            .apply(&parse_pairs(&format!("seed = {seed}")).unwrap())
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    if let Some(out) = out {
        config.out = Some(out);
    }
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let table = experiments::run(&config)?;
    let path = config
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", config.experiment.name())));
    table
        .write_to(&path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    println!(
        "{}: {} rows -> {}",
        config.experiment.name(),
        table.rows.len(),
        path.display()
    );
    Ok(())
}
