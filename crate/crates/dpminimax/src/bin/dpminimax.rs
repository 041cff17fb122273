//! Experiment runner for private minimax training.
//!
//! All experiment parameters come from a JSON config (`--config`); every
//! field has a default, so each subcommand also runs without one. Data
//! outputs are CSV files under `--out`; progress goes to standard error.
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical
//! non-convergence, 4 privacy-verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dpminimax::cli::{
    cmd_bounds, cmd_calibrate, cmd_generalization, cmd_noise_check, cmd_run, cmd_stability,
    exit_code_for, parse_config, resolve_workers, with_worker_pool, ExperimentConfig,
};
use dpminimax::{Error, Result};

#[derive(Parser)]
#[command(name = "dpminimax", version, about = "Differentially private minimax training: \
calibration, stability, and generalization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config; defaults apply for every omitted field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads (overrides DPMINIMAX_WORKERS and the config value).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Root seed (overrides the config value).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate the per-step noise scale for each sweep size and verify it
    /// against the privacy budget.
    Calibrate,
    /// Train once (first sweep size), writing the iterate trajectory and a
    /// risk report.
    Run,
    /// Estimate algorithmic stability from coupled runs on adjacent
    /// datasets across the size sweep.
    Stability,
    /// Train replicates across the size sweep, measuring generalization
    /// risks and their closed-form bounds.
    Generalization,
    /// Empirically validate the Gaussian norm-concentration threshold.
    NoiseCheck,
    /// Evaluate one named closed-form bound from the config.
    Bounds,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("config: cannot read {}: {e}", path.display()))
        })?,
        None => "{}".to_string(),
    };
    let mut config = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<()> {
    let config = load_config(cli)?;
    let env_workers = std::env::var("DPMINIMAX_WORKERS").ok();
    let workers = resolve_workers(cli.workers, env_workers.as_deref(), config.workers)?;
    let out = cli.out.clone();
    with_worker_pool(workers, || match cli.command {
        Command::Calibrate => {
            let text = cmd_calibrate(&config, &out)?;
            print!("{text}");
            Ok(())
        }
        Command::Run => cmd_run(&config, &out),
        Command::Stability => cmd_stability(&config, &out),
        Command::Generalization => cmd_generalization(&config, &out),
        Command::NoiseCheck => cmd_noise_check(&config, &out),
        Command::Bounds => {
            let text = cmd_bounds(&config)?;
            print!("{text}");
            Ok(())
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
