//! Batch front end: configuration ingestion, experiment subcommands, and
//! data emission for plots and tables.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::*;

#[derive(Parser)]
#[command(
    name = "blackstock",
    about = "Spectral harmonic-balance solver for time-periodic Blackstock-Crighton acoustics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file (see configs/ for schemas)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Seed for any randomized element (oracle initial states)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweep/scan fan-out (0 = automatic)
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one time-periodic problem
    Solve(RunArgs),
    /// Manufactured-solution verification across resolutions
    Mms(RunArgs),
    /// Dissipation-scale sweep of the resonance diagnostics
    ResonanceSweep(RunArgs),
    /// Cross-validate the fixed point against the time-stepping attractor
    OracleCompare(RunArgs),
    /// Convergence/divergence scan over a forcing-amplitude grid
    EpsilonScan(RunArgs),
}

fn load<T: serde::de::DeserializeOwned>(args: &RunArgs) -> Result<T, String> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("config parse error: {e}"))
}

fn prepare_run(args: &RunArgs) -> Result<(), String> {
    std::fs::create_dir_all(&args.out)
        .map_err(|e| format!("cannot create {}: {e}", args.out.display()))?;
    if args.workers > 0 {
        // ignore failure when a pool already exists (e.g. repeated calls in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(args.workers)
            .build_global();
    }
    Ok(())
}

fn dispatch(command: &Command) -> Result<i32, String> {
    match command {
        Command::Solve(args) => {
            prepare_run(args)?;
            cmd_solve(&load(args)?, &args.out)
        }
        Command::Mms(args) => {
            prepare_run(args)?;
            cmd_mms(&load(args)?, &args.out)
        }
        Command::ResonanceSweep(args) => {
            prepare_run(args)?;
            cmd_resonance_sweep(&load(args)?, &args.out)
        }
        Command::OracleCompare(args) => {
            prepare_run(args)?;
            cmd_oracle_compare(&load(args)?, &args.out, args.seed)
        }
        Command::EpsilonScan(args) => {
            prepare_run(args)?;
            cmd_epsilon_scan(&load(args)?, &args.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
