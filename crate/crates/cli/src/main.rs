//! `mdl`: run property suites, config-driven experiments, and counterexample replays.
//!
//! Exit codes: 0 success, 1 a suite failed (or a replay reproduced its
//! violation), 2 bad arguments or config, 3 budget exhausted under `--strict`.

mod config;
mod experiment;
mod svg;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mdl_core::suites::{replay, run_suite, Counterexample, SuiteName, SuiteStatus};
use mdl_core::Budget;

use crate::config::ExperimentConfig;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// A budget ran out where no downgrade was allowed.
#[derive(Debug)]
pub struct BudgetSkip(pub String);

impl fmt::Display for BudgetSkip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "budget exceeded: {}", self.0)
    }
}

impl std::error::Error for BudgetSkip {}

#[derive(Parser)]
#[command(name = "mdl", version, about = "Covering, quantization and entropy oracles for shift systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run property suites and write one JSON report per suite.
    Verify {
        /// Comma-separated suite names (default: all).
        #[arg(long, value_delimiter = ',')]
        suite: Vec<SuiteName>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Trials per suite (default: each suite's own count).
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        /// Treat suites skipped on budget as an error (exit 3).
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    /// Run an experiment described by a JSON config.
    Experiment {
        config: PathBuf,
        /// Output directory (overrides the config's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail with exit 3 instead of downgrading to greedy on budget exhaustion.
        #[arg(long)]
        strict: bool,
    },
    /// Rerun the trial behind a serialized counterexample.
    Replay { counterexample: PathBuf },
}

/// An error carrying its exit code.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("MDL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Usage(format!("MDL_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot size the worker pool")?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify(
    suites: Vec<SuiteName>,
    seed: u64,
    trials: Option<u64>,
    out: PathBuf,
    strict: bool,
    budget: Budget,
) -> Result<u8> {
    let suites = if suites.is_empty() { SuiteName::ALL.to_vec() } else { suites };
    fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut failed = false;
    let mut skipped = false;
    for name in suites {
        let report = run_suite(name, seed, trials.unwrap_or(name.default_trials()), &budget);
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        fs::write(out.join(format!("{name}.json")), json)?;
        for (i, cex) in report.failures.iter().enumerate() {
            let mut json = serde_json::to_string_pretty(cex)?;
            json.push('\n');
            fs::write(out.join(format!("{name}.counterexample-{i}.json")), json)?;
        }
        for w in &report.warnings {
            log::warn!("{name}: {w}");
        }
        let status = match report.status {
            SuiteStatus::Pass => "pass",
            SuiteStatus::Fail => "FAIL",
            SuiteStatus::Skipped => "skipped",
        };
        println!(
            "{name:<10} {status:<7} trials={} checks={} failures={} skipped={} time={:.2}s",
            report.trials,
            report.checks,
            report.failures.len(),
            report.skipped_trials,
            report.runtime.as_secs_f64()
        );
        failed |= report.status == SuiteStatus::Fail;
        skipped |= report.status == SuiteStatus::Skipped;
    }
    Ok(if failed {
        EXIT_FAIL
    } else if skipped && strict {
        EXIT_BUDGET
    } else {
        0
    })
}

fn run_experiment(path: PathBuf, out: Option<PathBuf>, strict: bool) -> Result<u8> {
    let text = fs::read_to_string(&path)
        .map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    let cfg = ExperimentConfig::from_json(&text).map_err(|e| Usage(format!("{e:#}")))?;
    let dir = out
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| Usage("no output directory: pass --out or set \"out\"".into()))?;
    let outcome = experiment::run(&cfg, strict)?;
    for w in &outcome.summary.warnings {
        log::warn!("{w}");
    }
    experiment::write_outputs(&outcome, &dir)?;
    println!(
        "{} cells written to {} (all exact: {})",
        outcome.cells.len(),
        dir.display(),
        outcome.summary.all_exact
    );
    Ok(0)
}

fn run_replay(path: PathBuf) -> Result<u8> {
    let text = fs::read_to_string(&path)
        .map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    let cex: Counterexample =
        serde_json::from_str(&text).map_err(|e| Usage(format!("invalid counterexample: {e}")))?;
    let outcome = replay(&cex);
    println!("{}", serde_json::to_string_pretty(&outcome)?);
    Ok(if outcome.reproduced { EXIT_FAIL } else { 0 })
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Verify {
            suite,
            seed,
            trials,
            out,
            strict,
            max_states,
            max_nodes,
        } => {
            let mut budget = Budget::default();
            if let Some(s) = max_states {
                budget.max_states = s;
            }
            if let Some(n) = max_nodes {
                budget.max_nodes = n;
            }
            if budget.max_states == 0 || budget.max_nodes == 0 {
                return Err(Usage("budgets must be positive".into()).into());
            }
            verify(suite, seed, trials, out, strict, budget)
        }
        Command::Experiment { config, out, strict } => run_experiment(config, out, strict),
        Command::Replay { counterexample } => run_replay(counterexample),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<BudgetSkip>().is_some() {
                EXIT_BUDGET
            } else if e.downcast_ref::<Usage>().is_some() {
                EXIT_USAGE
            } else {
                // core validation errors come from bad inputs
                e.downcast_ref::<mdl_core::Error>().map_or(EXIT_FAIL, |_| EXIT_USAGE)
            };
            ExitCode::from(code)
        }
    }
}
