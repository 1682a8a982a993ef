//! `etic` — single runs, the six-cell event-count table, grid sweeps, and
//! certificate reports for periodic event-triggered impulsive control.
//!
//! Output files named in a configuration are written relative to `--out`
//! (absolute paths are honored as given). `--seed` feeds the sampled
//! certificate estimation in `certify`; the other subcommands are fully
//! deterministic and ignore it.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use etic_core::config::{load_run_config, load_sweep_config};
use etic_core::report::{render_certify_summary, render_run_summary, render_table1, to_json};
use etic_core::runner;
use etic_core::Result;

#[derive(Parser)]
#[command(name = "etic", version, about = "Event-triggered impulsive control toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for output files (created if missing)
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for sampled certificate estimation
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration and verify its guarantees
    Run { config: PathBuf },
    /// Reproduce the six-cell event-count table
    Table1 {
        #[arg(long, default_value = "c103", value_parser = ["c103", "a2of0.1"])]
        variant: String,
    },
    /// Evaluate a parameter grid into a CSV of per-cell metrics
    Sweep { config: PathBuf },
    /// Score a model's certificate and gain against the stability condition
    Certify { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code().clamp(0, 255) as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = load_run_config(config)?;
            let outcome = runner::run_config(&cfg, &cli.out)?;
            print!("{}", render_run_summary(&outcome.report));
            for path in [&outcome.trajectory_csv, &outcome.report_path]
                .into_iter()
                .flatten()
            {
                println!("wrote {}", path.display());
            }
        }
        Command::Table1 { variant } => {
            let report = runner::run_table1(variant)?;
            print!("{}", render_table1(&report));
            fs::create_dir_all(&cli.out)?;
            let path = cli.out.join(format!("table1-{variant}.json"));
            fs::write(&path, to_json(&report)?)?;
            println!("wrote {}", path.display());
        }
        Command::Sweep { config } => {
            let cfg = load_sweep_config(config)?;
            let outcome = runner::run_sweep(&cfg, &cli.out)?;
            match &outcome.csv_path {
                Some(path) => println!("wrote {} ({} rows)", path.display(), outcome.rows.len()),
                None => print!("{}", outcome.csv),
            }
        }
        Command::Certify { config } => {
            let cfg = load_run_config(config)?;
            let outcome = runner::run_certify(&cfg, cli.seed, &cli.out)?;
            print!("{}", render_certify_summary(&outcome.report));
            if let Some(path) = &outcome.report_path {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
