//! Command-line driver: single-point analysis, simulation, parameter sweeps
//! and secure-region export as CSV or JSON tables.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmd;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{load, OutputSpec, SweepSim};
use crate::error::{CliError, Result};
use crate::output::{Format, Table};

#[derive(Debug, Parser)]
#[command(
    name = "pouw",
    version,
    about = "Security analysis of optimization-based proof of useful work"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients, payoffs and every verdict at one parameter point.
    Analyze(Common),
    /// Monte-Carlo mining or long-range runs next to their analytic values.
    Simulate(Common),
    /// Cartesian sweep over adversary share, rates or reward slope.
    Sweep(Common),
    /// Secure boundaries against selfish and malicious adversaries per eta.
    Region(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML experiment file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rounds: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "POUW_JOBS")]
    pub jobs: Option<usize>,
}

impl Common {
    fn reject(&self, command: &str, seed: bool, rounds: bool) -> Result<()> {
        let unused = |flag: &str| CliError::Config(format!("{command} does not take --{flag}"));
        if seed && self.seed.is_some() {
            return Err(unused("seed"));
        }
        if rounds && self.rounds.is_some() {
            return Err(unused("rounds"));
        }
        Ok(())
    }
}

/// Where and how to write, flags over file settings.
struct Sink {
    out: Option<PathBuf>,
    format: Format,
}

impl Sink {
    fn new(common: &Common, file: &OutputSpec) -> Self {
        Self {
            out: common.out.clone().or_else(|| file.out.clone()),
            format: common.format.or(file.format).unwrap_or_default(),
        }
    }

    fn emit(&self, table: &Table) -> Result<()> {
        let mut buf = Vec::new();
        table.write(self.format, &mut buf)?;
        match &self.out {
            Some(path) => std::fs::write(path, buf)
                .map_err(|e| CliError::Write(format!("{}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(&buf)
                .map_err(|e| CliError::Write(e.to_string())),
        }
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// Loads, validates, computes, then writes. Nothing is written unless every
/// step before it succeeded.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(c) => {
            c.reject("analyze", true, true)?;
            let file: config::AnalyzeConfig = load(&c.config)?;
            let sink = Sink::new(&c, &file.output);
            let plan = cmd::analyze::prepare(file)?;
            let table = pool(c.jobs)?.install(|| cmd::analyze::run(&plan))?;
            sink.emit(&table)
        }
        Command::Simulate(c) => {
            let mut file: config::SimulateConfig = load(&c.config)?;
            if file.longrange.is_some() {
                c.reject("simulate with [longrange]", false, true)?;
            }
            if let Some(seed) = c.seed {
                file.seeds = vec![seed];
            }
            if let Some(rounds) = c.rounds {
                file.rounds = rounds;
            }
            let sink = Sink::new(&c, &file.output);
            let plan = cmd::simulate::prepare(file)?;
            let table = pool(c.jobs)?.install(|| cmd::simulate::run(&plan))?;
            sink.emit(&table)
        }
        Command::Sweep(c) => {
            let mut file: config::SweepConfig = load(&c.config)?;
            if let Some(seed) = c.seed {
                file.seed = seed;
            }
            if let Some(rounds) = c.rounds {
                file.simulation
                    .get_or_insert(SweepSim {
                        rounds,
                        mode: Default::default(),
                        truncate: true,
                    })
                    .rounds = rounds;
            }
            let sink = Sink::new(&c, &file.output);
            let plan = cmd::sweep::prepare(file)?;
            let table = pool(c.jobs)?.install(|| cmd::sweep::run(&plan))?;
            sink.emit(&table)
        }
        Command::Region(c) => {
            c.reject("region", true, true)?;
            let file: config::RegionFileConfig = load(&c.config)?;
            let sink = Sink::new(&c, &file.output);
            let plan = cmd::region::prepare(file)?;
            let table = pool(c.jobs)?.install(|| cmd::region::run(&plan))?;
            sink.emit(&table)
        }
    }
}
