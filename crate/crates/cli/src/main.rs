mod commands;
mod config;
mod error;
mod models;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Experiment, Overrides, RawConfig, Task};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "hamsplit", version, about = "Runs, sweeps and benchmarks for the corrected kick-move-kick integrators")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat TOML experiment file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    order: Option<u32>,

    #[arg(long, global = true)]
    tau: Option<f64>,

    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Write every coordinate instead of the first 32
    #[arg(long, global = true)]
    full_state: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Integrate one trajectory and write run.csv
    Run,
    /// Cross product of orders and steps against an order-8 reference
    OrderSweep,
    /// The FPU global-error experiment: sweep plus eps(t) curves and linear fits
    Fpu,
    /// Time FPU chains of several sizes
    Bench,
    /// Re-read the CSVs in --out, redraw charts and print a digest
    Report,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let task = match cli.command {
        Command::Run => Task::Run,
        Command::OrderSweep => Task::Sweep,
        Command::Fpu => Task::Fpu,
        Command::Bench => Task::Bench,
        Command::Report => Task::Report,
    };
    let raw = match &cli.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    let over = Overrides {
        order: cli.order,
        tau: cli.tau,
        steps: cli.steps,
        out: cli.out,
        full_state: cli.full_state,
    };
    let exp = Experiment::resolve(raw, &over, task)?;
    match task {
        Task::Run => commands::run(&exp),
        Task::Sweep => commands::sweep(&exp, false),
        Task::Fpu => commands::sweep(&exp, true),
        Task::Bench => commands::bench(&exp),
        Task::Report => commands::report(&exp),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hamsplit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
