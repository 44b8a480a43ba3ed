//! Named property suites: random instance generators, exact oracles and a
//! pass/fail report with replayable counterexamples.
//!
//! Every trial draws from its own ChaCha8 stream (`seed`, stream = trial index),
//! so trials run in parallel and reports are identical across runs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::budget::Budget;
use crate::error::{Error, Result};

mod block;
mod combinatorial;
mod gen;
mod information;
mod quant;
mod transport_suites;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SuiteName {
    Chain,
    ClosedOpen,
    SubAdd,
    Ks,
    BkBound,
    BkConvex,
    Markov,
    Dominate,
    LpKatok,
    MetricRel,
    Strassen,
    Block,
    /// Always fails; exercises the failure and replay paths.
    Canary,
}

impl SuiteName {
    /// Every real suite, in reporting order (the canary is not listed).
    pub const ALL: [SuiteName; 12] = [
        SuiteName::Chain,
        SuiteName::ClosedOpen,
        SuiteName::SubAdd,
        SuiteName::Ks,
        SuiteName::BkBound,
        SuiteName::BkConvex,
        SuiteName::Markov,
        SuiteName::Dominate,
        SuiteName::LpKatok,
        SuiteName::MetricRel,
        SuiteName::Strassen,
        SuiteName::Block,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Chain => "CHAIN",
            SuiteName::ClosedOpen => "CLOSEDOPEN",
            SuiteName::SubAdd => "SUBADD",
            SuiteName::Ks => "KS",
            SuiteName::BkBound => "BKBOUND",
            SuiteName::BkConvex => "BKCONVEX",
            SuiteName::Markov => "MARKOV",
            SuiteName::Dominate => "DOMINATE",
            SuiteName::LpKatok => "LPKATOK",
            SuiteName::MetricRel => "METRICREL",
            SuiteName::Strassen => "STRASSEN",
            SuiteName::Block => "BLOCK",
            SuiteName::Canary => "CANARY",
        }
    }

    /// Trial count used when none is given.
    pub fn default_trials(self) -> u64 {
        match self {
            SuiteName::Chain | SuiteName::ClosedOpen | SuiteName::SubAdd => 200,
            SuiteName::Ks | SuiteName::BkBound => 100,
            SuiteName::BkConvex => 200,
            SuiteName::Markov | SuiteName::Dominate | SuiteName::LpKatok => 300,
            SuiteName::MetricRel | SuiteName::Strassen => 500,
            SuiteName::Block => 50,
            SuiteName::Canary => 1,
        }
    }

    fn trial_fn(self) -> TrialFn {
        match self {
            SuiteName::Chain => combinatorial::chain,
            SuiteName::ClosedOpen => combinatorial::closed_open,
            SuiteName::SubAdd => combinatorial::subadd,
            SuiteName::Ks => information::katok_shapira,
            SuiteName::BkBound => information::bk_bound,
            SuiteName::BkConvex => information::bk_convex,
            SuiteName::Markov => quant::markov,
            SuiteName::Dominate => quant::dominate,
            SuiteName::LpKatok => quant::lp_katok,
            SuiteName::MetricRel => transport_suites::metric_relations,
            SuiteName::Strassen => transport_suites::strassen,
            SuiteName::Block => block::block,
            SuiteName::Canary => canary,
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        SuiteName::ALL
            .iter()
            .chain(std::iter::once(&SuiteName::Canary))
            .copied()
            .find(|n| n.as_str() == up)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteStatus {
    Pass,
    Fail,
    Skipped,
}

/// One asserted relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs <= rhs + tol` (or `|lhs - rhs| <= tol` for equalities).
    pub tol: f64,
    pub relation: Relation,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Eq,
}

/// A failed check with everything needed to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub suite: SuiteName,
    pub seed: u64,
    pub trial: u64,
    pub budget: Budget,
    pub check: Check,
    pub instance: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub seed: u64,
    pub trials: u64,
    pub budget: Budget,
    pub status: SuiteStatus,
    /// Relations evaluated across all trials.
    pub checks: u64,
    pub skipped_trials: u64,
    pub failures: Vec<Counterexample>,
    pub warnings: Vec<String>,
    /// Named diagnostics (estimates, ratios) recorded by the suite.
    pub summary: BTreeMap<String, f64>,
    /// Wall-clock time; left out of the serialized report so reruns match byte for byte.
    #[serde(skip)]
    pub runtime: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.status == SuiteStatus::Pass
    }
}

/// State handed to a trial: its random stream and the checks it records.
pub struct TrialContext {
    pub rng: ChaCha8Rng,
    pub trial: u64,
    pub budget: Budget,
    checks: Vec<Check>,
    instance: Value,
    summary: BTreeMap<String, f64>,
}

impl TrialContext {
    fn new(seed: u64, trial: u64, budget: Budget) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        TrialContext {
            rng,
            trial,
            budget,
            checks: Vec::new(),
            instance: Value::Null,
            summary: BTreeMap::new(),
        }
    }

    /// Attach a description of the generated instance.
    pub fn describe(&mut self, instance: Value) {
        self.instance = instance;
    }

    pub fn record(&mut self, key: impl Into<String>, value: f64) {
        self.summary.insert(key.into(), value);
    }

    pub fn le(&mut self, label: impl Into<String>, lhs: f64, rhs: f64) {
        self.le_tol(label, lhs, rhs, 0.0);
    }

    pub fn le_tol(&mut self, label: impl Into<String>, lhs: f64, rhs: f64, tol: f64) {
        self.checks.push(Check {
            label: label.into(),
            lhs,
            rhs,
            tol,
            relation: Relation::Le,
            holds: lhs <= rhs + tol,
        });
    }

    pub fn eq(&mut self, label: impl Into<String>, lhs: f64, rhs: f64) {
        self.eq_tol(label, lhs, rhs, 0.0);
    }

    pub fn eq_tol(&mut self, label: impl Into<String>, lhs: f64, rhs: f64, tol: f64) {
        self.checks.push(Check {
            label: label.into(),
            lhs,
            rhs,
            tol,
            relation: Relation::Eq,
            holds: (lhs - rhs).abs() <= tol,
        });
    }

    /// Boolean property, recorded as `lhs = 1` against `rhs = 1`.
    pub fn truth(&mut self, label: impl Into<String>, ok: bool) {
        self.eq(label, if ok { 1.0 } else { 0.0 }, 1.0);
    }
}

type TrialFn = fn(&mut TrialContext) -> Result<()>;

struct TrialOutcome {
    trial: u64,
    checks: Vec<Check>,
    instance: Value,
    summary: BTreeMap<String, f64>,
    skipped: bool,
}

fn run_trial(name: SuiteName, seed: u64, trial: u64, budget: &Budget) -> TrialOutcome {
    let mut ctx = TrialContext::new(seed, trial, *budget);
    let result = (name.trial_fn())(&mut ctx);
    let mut skipped = false;
    match result {
        Ok(()) => {}
        Err(Error::BudgetExceeded { .. }) => skipped = true,
        Err(e) => ctx.truth(format!("trial completed without error: {e}"), false),
    }
    TrialOutcome {
        trial,
        checks: ctx.checks,
        instance: ctx.instance,
        summary: ctx.summary,
        skipped,
    }
}

/// Run `trials` independent trials of a suite.
pub fn run_suite(name: SuiteName, seed: u64, trials: u64, budget: &Budget) -> SuiteReport {
    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(name, seed, t, budget))
        .collect();
    let mut report = SuiteReport {
        suite: name,
        seed,
        trials,
        budget: *budget,
        status: SuiteStatus::Pass,
        checks: 0,
        skipped_trials: 0,
        failures: Vec::new(),
        warnings: Vec::new(),
        summary: BTreeMap::new(),
        runtime: Duration::ZERO,
    };
    if trials == 0 {
        report.warnings.push("no trials requested; the pass is vacuous".into());
    }
    for o in outcomes {
        report.checks += o.checks.len() as u64;
        if o.skipped {
            report.skipped_trials += 1;
        }
        for (k, v) in o.summary {
            report.summary.entry(k).or_insert(v);
        }
        for c in o.checks.into_iter().filter(|c| !c.holds) {
            report.failures.push(Counterexample {
                suite: name,
                seed,
                trial: o.trial,
                budget: *budget,
                check: c,
                instance: o.instance.clone(),
            });
        }
    }
    if report.skipped_trials > 0 {
        report.warnings.push(format!(
            "{} trial(s) exceeded the budget and were skipped",
            report.skipped_trials
        ));
    }
    report.status = if !report.failures.is_empty() {
        SuiteStatus::Fail
    } else if report.skipped_trials > 0 {
        SuiteStatus::Skipped
    } else {
        SuiteStatus::Pass
    };
    report.runtime = start.elapsed();
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    /// The same check failed again with the same two sides.
    pub reproduced: bool,
    /// The check as evaluated by the rerun, if the trial produced it.
    pub check: Option<Check>,
}

/// Rerun the trial behind a counterexample and re-evaluate its check.
pub fn replay(cex: &Counterexample) -> ReplayOutcome {
    let outcome = run_trial(cex.suite, cex.seed, cex.trial, &cex.budget);
    let check = outcome.checks.into_iter().find(|c| c.label == cex.check.label);
    let reproduced = check.as_ref().is_some_and(|c| {
        !c.holds && c.lhs.to_bits() == cex.check.lhs.to_bits() && c.rhs.to_bits() == cex.check.rhs.to_bits()
    });
    ReplayOutcome { reproduced, check }
}

fn canary(ctx: &mut TrialContext) -> Result<()> {
    let x: f64 = rand::Rng::random(&mut ctx.rng);
    ctx.describe(serde_json::json!({ "x": x }));
    ctx.le("x <= x - 1 (deliberately false)", x, x - 1.0);
    Ok(())
}
