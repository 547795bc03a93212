//! `subgauss` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification reports FAIL, 2 on any error.

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Heat-equation constants of a model.
    Constants,
    /// Sup-tail bound curve over a box.
    BoundSup,
    /// Growth constants and envelope tail curves over a strip.
    BoundGrowth,
    /// Covering numbers: analytic bound and greedy oracle.
    Covering,
    /// Monte Carlo sup tails checked against the bound.
    SimulateVerify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::BoundSup => "bound-sup",
            Command::BoundGrowth => "bound-growth",
            Command::Covering => "covering",
            Command::SimulateVerify => "simulate-verify",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "subgauss", version, about = "Sup and growth tail bounds for sub-Gaussian fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the config tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Worker threads for the simulation; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

/// Loads the config and applies command-line overrides.
pub fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli.config.as_ref().context("--config <path> is required")?;
    let mut cfg = RunConfig::from_path(path)?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.tol.is_some() {
        cfg.tol = cli.tol;
    }
    if let Some(t) = cfg.tol {
        anyhow::ensure!(t > 0.0 && t.is_finite(), "tol must be positive, got {t}");
    }
    Ok(cfg)
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<output::CommandOutput> {
    match command {
        Command::Constants => commands::constants(cfg),
        Command::BoundSup => commands::bound_sup(cfg),
        Command::BoundGrowth => commands::bound_growth(cfg),
        Command::Covering => commands::covering(cfg),
        Command::SimulateVerify => commands::simulate_verify(cfg),
    }
}

/// Runs one invocation and returns its exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli)?;
    let hash = cfg.hash()?;
    let body = || execute(cli.command, &cfg);
    let out = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(body)?,
        None => body()?,
    };
    let (bytes, ext) = match cli.format {
        Format::Json => (out.to_json(&hash, cfg.seed)?, "json"),
        Format::Csv => (out.to_csv(&hash, cfg.seed)?, "csv"),
    };
    match &cli.out {
        Some(dir) => {
            output::write_file(dir, &format!("{}.{ext}", out.command), &bytes)?;
            if cli.command == Command::SimulateVerify && cli.format == Format::Json {
                output::write_file(dir, &format!("{}.csv", out.command), &out.to_csv(&hash, cfg.seed)?)?;
            }
        }
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(if out.failed { EXIT_FAIL } else { EXIT_OK })
}
