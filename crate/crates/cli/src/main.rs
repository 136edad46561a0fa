// NaN must fail these checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]
mod commands;
mod output;
mod scenario;

use clap::{Parser, ValueEnum};
use commands::{Context, Failure};
use scenario::{ConfigError, Scenario};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Eigen,
    Steady,
    Bifurcate,
    Spectrum,
    Simulate,
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::Steady => "steady",
            Command::Bifurcate => "bifurcate",
            Command::Spectrum => "spectrum",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
        }
    }
}

/// Memory-diffusion logistic model on an interval: eigenvalues, steady
/// states, Hopf data, delay spectra and simulations.
#[derive(Debug, Parser)]
#[command(name = "memodiff", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (flat JSON object).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Seed for the random starts of the steady-state uniqueness probe.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn threads() -> usize {
    std::env::var("MEMODIFF_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn load(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    Scenario::parse(&text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    let scenario = match load(&cli.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("memodiff: config error: {e}");
            return ExitCode::from(64);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("memodiff: cannot create {}: {e}", cli.out.display());
        return ExitCode::from(1);
    }
    let threads = threads();
    let result = scenario.setup().map_err(Failure::from).and_then(|setup| {
        let cx = Context {
            scenario: &scenario,
            setup,
            out: &cli.out,
            seed: cli.seed,
            threads,
        };
        match cli.command {
            Command::Eigen => commands::eigen(&cx),
            Command::Steady => commands::steady(&cx),
            Command::Bifurcate => commands::bifurcate(&cx),
            Command::Spectrum => commands::spectrum(&cx),
            Command::Simulate => commands::simulate_cmd(&cx),
            Command::Sweep => commands::sweep(&cx),
        }
    });
    let (code, summary, error) = match &result {
        Ok(v) => (0, v.clone(), None),
        Err(f) => (f.exit_code(), serde_json::Value::Null, Some(f.message())),
    };
    let meta = json!({
        "command": cli.command.name(),
        "config": cli.config.display().to_string(),
        "scenario": scenario,
        "normalization": scenario.normalization,
        "seed": cli.seed,
        "threads": threads,
        "version": env!("CARGO_PKG_VERSION"),
        "exit_code": code,
        "error": error,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
        "summary": summary,
    });
    let text = serde_json::to_string_pretty(&meta).unwrap_or_default();
    if let Err(e) = std::fs::write(cli.out.join("run.json"), text + "\n") {
        eprintln!("memodiff: cannot write run.json: {e}");
        return ExitCode::from(1);
    }
    if let Some(msg) = error {
        eprintln!("memodiff: {msg}");
    }
    ExitCode::from(code as u8)
}
