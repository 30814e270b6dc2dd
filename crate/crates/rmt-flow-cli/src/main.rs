//! `rmt-flow` command line: path simulation, verification scenarios and
//! density tables.

mod config;
mod density;
mod output;
mod simulate;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "rmt-flow", version, about = "Random-matrix processes, noncolliding diffusions and their densities")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "RMT_FLOW_THREADS")]
    threads: Option<usize>,
    /// TOML file with default values for the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate matrix processes or particle systems and dump their paths.
    Simulate(simulate::SimulateArgs),
    /// Run a verification scenario and write a JSON report.
    Verify(verify::VerifyArgs),
    /// Tabulate a density on a grid as CSV.
    Density(density::DensityArgs),
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().context("setting up the worker pool")?;
    }
    let cfg = match &cli.config {
        Some(p) => config::load(p)?,
        None => Default::default(),
    };
    match cli.command {
        Command::Simulate(a) => {
            simulate::run(config::fill(a, &config::section(&cfg, "simulate"))?)?;
            Ok(true)
        }
        Command::Density(a) => {
            density::run(config::fill(a, &config::section(&cfg, "density"))?)?;
            Ok(true)
        }
        Command::Verify(a) => {
            let a = config::fill(a, &config::section(&cfg, "verify"))?;
            let report = verify::evaluate(&a)?;
            let mut out = output::open(a.output.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            out.write_all(b"\n")?;
            out.flush()?;
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            eprintln!("{}: {} ({} checks, {failed} failed)", report.scenario, if report.pass { "PASS" } else { "FAIL" }, report.checks.len());
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
