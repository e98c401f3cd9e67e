use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use corrspec::experiment::{self, GenKind, GenOutput};
use corrspec::{exit, io, CliError, CliResult, ExperimentConfig};
use serde::Serialize;

/// Hamiltonian reconstruction and correlation-spectrum experiments.
#[derive(Parser)]
#[command(name = "corrspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation spectrum of the configured state.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Also dump the correlation matrix as a binary array.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Kernel reconstruction; exit code 0 unique, 2 non-unique, 3 no solution.
    Reconstruct {
        #[command(flatten)]
        common: Common,
    },
    /// Momentum-resolved band structure of a zero-momentum state.
    Bands {
        #[command(flatten)]
        common: Common,
    },
    /// Sensitivity of the reconstruction to random perturbations of M.
    Perturb {
        #[command(flatten)]
        common: Common,
    },
    /// Recovery from the reduced state of a window.
    Subregion {
        #[command(flatten)]
        common: Common,
    },
    /// Emit a resolved config, Hamiltonian, basis descriptor or state.
    Gen {
        #[command(flatten)]
        common: Common,
        #[arg(value_enum, default_value = "config")]
        kind: GenKind,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pin every reduction to a fixed order.
    #[arg(long)]
    deterministic: bool,
    /// Dotted-path override such as `lattice.n=10`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut overrides = self.set.clone();
        if let Some(seed) = self.seed {
            overrides.push(format!("seed={seed}"));
        }
        ExperimentConfig::resolve(self.config.as_deref(), &overrides)
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(common: &Common, value: &T) -> CliResult<()> {
    emit(common.out.as_deref(), io::to_json_string(value)?.as_bytes())
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Spectrum { common, matrix } => {
            let cfg = common.resolve()?;
            let report = experiment::run_spectrum(&cfg, common.deterministic, matrix.as_deref())?;
            emit_json(&common, &report)?;
            Ok(exit::OK)
        }
        Command::Reconstruct { common } => {
            let cfg = common.resolve()?;
            let report = experiment::run_reconstruct(&cfg, common.deterministic)?;
            emit_json(&common, &report)?;
            Ok(experiment::reconstruct_exit_code(&report))
        }
        Command::Bands { common } => {
            let cfg = common.resolve()?;
            emit_json(&common, &experiment::run_bands(&cfg, common.deterministic)?)?;
            Ok(exit::OK)
        }
        Command::Perturb { common } => {
            let cfg = common.resolve()?;
            emit_json(&common, &experiment::run_perturb(&cfg, common.deterministic)?)?;
            Ok(exit::OK)
        }
        Command::Subregion { common } => {
            let cfg = common.resolve()?;
            emit_json(&common, &experiment::run_subregion(&cfg, common.deterministic)?)?;
            Ok(exit::OK)
        }
        Command::Gen { common, kind } => {
            let cfg = common.resolve()?;
            match experiment::run_gen(&cfg, kind)? {
                GenOutput::Text(s) => emit(common.out.as_deref(), s.as_bytes())?,
                GenOutput::Binary(b) => {
                    let path = common
                        .out
                        .as_deref()
                        .ok_or_else(|| CliError::Config("binary output needs --out".into()))?;
                    emit(Some(path), &b)?;
                }
            }
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("corrspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
