//! Runs an experiment grid of `(eps, n)` cells and writes the CSV table, the
//! JSON summary and the SVG plot.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use mdl_core::covering::{box_dimension_counts, count, BoxTarget, CountMethod};
use mdl_core::entropy::{brin_katok_average, katok_on_space};
use mdl_core::estimators::{dimension_report, growth_rate, growth_rate_log, ratio_report};
use mdl_core::metric::exhaustive_lift;
use mdl_core::quantization::{quantization_number, QuantMethod};
use mdl_core::{BallKind, Budget, DimensionReport, Error, FiniteMeasure, FiniteMetricSpace, GrowthEstimate};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BallSpec, ExperimentConfig, Method, Quantity};
use crate::svg;
use crate::BudgetSkip;

/// One row of `counts.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub eps: f64,
    pub n: usize,
    pub quantity: String,
    pub value: f64,
    pub exact: bool,
    pub method: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveFit {
    pub eps: f64,
    pub fit: Option<GrowthEstimate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub quantity: String,
    pub all_exact: bool,
    pub warnings: Vec<String>,
    /// Growth in `n` per scale (absent for box counts).
    pub growth: Vec<CurveFit>,
    pub dimension: Option<DimensionReport>,
}

pub struct Outcome {
    pub cells: Vec<Cell>,
    pub summary: Summary,
}

struct Lifted {
    n: usize,
    space: FiniteMetricSpace,
    mu: FiniteMeasure,
}

/// Value, exactness and method name of one cell.
fn evaluate(
    cfg: &ExperimentConfig,
    lift: &Lifted,
    eps: f64,
    greedy: bool,
) -> mdl_core::Result<(f64, bool, String)> {
    let budget = &cfg.budget;
    match &cfg.quantity {
        Quantity::Count { kind } => {
            let method = if greedy { CountMethod::Greedy } else { CountMethod::BranchBound };
            let r = count(&lift.space, eps, (*kind).into(), method, budget)?;
            Ok((r.value as f64, r.exact, method.name().into()))
        }
        Quantity::Quantization { kind } => {
            let method = if greedy { QuantMethod::Greedy } else { QuantMethod::Exact };
            let r = quantization_number(&lift.mu, &lift.space, eps, (*kind).into(), method, budget)?;
            Ok((r.value as f64, r.exact, if greedy { "greedy" } else { "exact" }.into()))
        }
        Quantity::Katok { ball } => {
            let kind = match ball {
                BallSpec::Open => BallKind::Open,
                BallSpec::Closed => BallKind::Closed,
            };
            let r = katok_on_space(&lift.mu, &lift.space, lift.n, eps, cfg.delta, kind, !greedy, budget)?;
            Ok((r.value as f64, r.exact, if greedy { "greedy" } else { "exact" }.into()))
        }
        Quantity::BrinKatok => Ok((
            brin_katok_average(&lift.mu, &lift.space, lift.n, eps)?,
            true,
            "enumeration".into(),
        )),
        Quantity::Box => unreachable!("box counts do not use lifts"),
    }
}

/// Exact first; on a blown budget fall back to greedy unless `strict`.
fn evaluate_cell(
    cfg: &ExperimentConfig,
    lift: &Lifted,
    eps: f64,
    strict: bool,
) -> Result<(Cell, Option<String>)> {
    let greedy = cfg.method == Method::Greedy;
    let label = cfg.quantity.label();
    let (result, warning) = match evaluate(cfg, lift, eps, greedy) {
        Err(Error::BudgetExceeded { what, limit }) if !greedy && !strict => {
            let note = format!(
                "eps={eps}, n={}: {what} exceeded {limit}; reporting the greedy value",
                lift.n
            );
            (evaluate(cfg, lift, eps, true), Some(note))
        }
        other => (other, None),
    };
    let (value, exact, method) = result.map_err(|e| match e {
        Error::BudgetExceeded { .. } => anyhow::Error::new(BudgetSkip(e.to_string())),
        e => anyhow::Error::new(e),
    })?;
    Ok((
        Cell {
            eps,
            n: lift.n,
            quantity: label,
            value,
            exact,
            method,
        },
        warning,
    ))
}

pub fn run(cfg: &ExperimentConfig, strict: bool) -> Result<Outcome> {
    let sys = cfg.system()?;
    let label = cfg.quantity.label();
    let mut warnings = Vec::new();
    let mut cells = Vec::new();

    if cfg.quantity == Quantity::Box {
        let counts = box_dimension_counts(BoxTarget::Alphabet(sys.alphabet()), &cfg.eps, &Budget::default())?;
        for c in counts {
            cells.push(Cell {
                eps: c.eps,
                n: 1,
                quantity: label.clone(),
                value: c.value as f64,
                exact: c.exact,
                method: "interval_sweep".into(),
            });
        }
    } else {
        let rule = cfg.measure(&sys)?;
        let lifts = cfg
            .n
            .par_iter()
            .map(|&n| {
                let space = exhaustive_lift(&sys, n, &cfg.budget).map_err(|e| match e {
                    Error::BudgetExceeded { .. } => anyhow::Error::new(BudgetSkip(e.to_string())),
                    e => anyhow::Error::new(e),
                })?;
                let mu = rule.on_space(&space)?;
                Ok(Lifted { n, space, mu })
            })
            .collect::<Result<Vec<_>>>()?;
        let jobs: Vec<(f64, &Lifted)> = cfg.eps.iter().flat_map(|&e| lifts.iter().map(move |l| (e, l))).collect();
        let done = jobs
            .par_iter()
            .map(|&(eps, lift)| evaluate_cell(cfg, lift, eps, strict))
            .collect::<Result<Vec<_>>>()?;
        for (cell, warning) in done {
            warnings.extend(warning);
            cells.push(cell);
        }
    }

    let (growth, dimension) = fit(cfg, &cells, &mut warnings);
    let all_exact = cells.iter().all(|c| c.exact);
    Ok(Outcome {
        summary: Summary {
            config: cfg.clone(),
            quantity: label,
            all_exact,
            warnings,
            growth,
            dimension,
        },
        cells,
    })
}

fn fit(cfg: &ExperimentConfig, cells: &[Cell], warnings: &mut Vec<String>) -> (Vec<CurveFit>, Option<DimensionReport>) {
    if cfg.quantity == Quantity::Box {
        let rates: Vec<f64> = cells.iter().map(|c| c.value.ln()).collect();
        return match ratio_report(&rates, &cfg.eps) {
            Ok(r) => (Vec::new(), Some(r)),
            Err(e) => {
                warnings.push(format!("no dimension report: {e}"));
                (Vec::new(), None)
            }
        };
    }
    let mut growth = Vec::new();
    let mut fits = Vec::new();
    for &eps in &cfg.eps {
        let curve: Vec<(usize, f64)> = cells.iter().filter(|c| c.eps == eps).map(|c| (c.n, c.value)).collect();
        let estimate = if cfg.quantity.is_count() {
            growth_rate(&curve, None)
        } else {
            // rates become totals, fitted on the log scale they already live on
            let totals: Vec<(usize, f64)> = curve.iter().map(|&(n, v)| (n, n as f64 * v)).collect();
            growth_rate_log(&totals, None)
        };
        match estimate {
            Ok(g) => {
                fits.push(g.clone());
                growth.push(CurveFit { eps, fit: Some(g) });
            }
            Err(e) => {
                warnings.push(format!("eps={eps}: no growth fit: {e}"));
                growth.push(CurveFit { eps, fit: None });
            }
        }
    }
    let dimension = if fits.len() == cfg.eps.len() {
        match dimension_report(&fits, &cfg.eps) {
            Ok(r) => Some(r),
            Err(e) => {
                warnings.push(format!("no dimension report: {e}"));
                None
            }
        }
    } else {
        None
    };
    (growth, dimension)
}

/// Write `counts.csv`, `summary.json` and `plot.svg` into `dir`.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut w = csv::Writer::from_path(dir.join("counts.csv"))?;
    for c in &outcome.cells {
        w.serialize(c)?;
    }
    w.flush()?;
    let mut json = serde_json::to_string_pretty(&outcome.summary)?;
    json.push('\n');
    fs::write(dir.join("summary.json"), json)?;
    fs::write(dir.join("plot.svg"), svg::render(&outcome.cells, &outcome.summary))?;
    Ok(())
}
