//! `toephank <experiment> [--config path.json] [--out dir] [--p ...] [--sizes ...] [--seed ...]`
//!
//! Exit status: 0 when every assertion holds, 1 when any assertion fails or a run errors,
//! 2 for unusable input (bad flags, unreadable or invalid config, I/O failure).

// `!(x >= 1.0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use config::{read_config, Experiment, Flags, Settings};
use report::{emit, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("unresolved reference: {0}")]
    Unresolved(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] toephank_core::Error),
}

#[derive(Debug, Parser)]
#[command(name = "toephank", version, about = "Verification suites for Toeplitz+Hankel finite sections")]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON config; its fields override the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json, report.csv and plotdata.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Exponents, comma separated (`inf` allowed).
    #[arg(long, value_delimiter = ',', value_parser = parse_p)]
    p: Option<Vec<f64>>,
    /// Section sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_p(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|e| e.to_string()),
    }
}

/// Caps the worker pool at `TOEPHANK_THREADS` when set.
fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TOEPHANK_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("TOEPHANK_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn main_inner(cli: Cli) -> Result<bool, CliError> {
    init_threads()?;
    let file = cli.config.as_deref().map(read_config).transpose()?;
    let flags = Flags {
        p: cli.p,
        sizes: cli.sizes,
        seed: cli.seed,
    };
    let settings = Settings::resolve(cli.experiment, &flags, file)?;
    let start = Instant::now();
    let runs = experiments::run(&settings);
    let report = Report::new(settings, runs, start.elapsed().as_secs_f64());
    emit(&report, &cli.out)?;
    for r in &report.runs {
        let status = if r.ok() { "PASS" } else { "FAIL" };
        match &r.error {
            Some(e) => println!("{status} {} error: {e}", r.run),
            None => println!("{status} {}", r.run),
        }
    }
    println!(
        "{}: {} of {} assertions failed",
        report.config.name, report.failed, report.assertions
    );
    Ok(report.passed)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("toephank: {e}");
            ExitCode::from(2)
        }
    }
}
