//! Experiment configuration: parsed from JSON, validated, and echoed back with
//! every default filled in.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use mdl_core::measures::ComponentDecomposition;
use mdl_core::metric::MetricAlphabet;
use mdl_core::systems::{make_block_system, make_grid_alphabet, make_reciprocal_alphabet, LetterDist, ParamRule};
use mdl_core::{Budget, CountKind, MeasureRule, QuantKind, SymbolicSystem};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Grid {
        m: usize,
    },
    Reciprocal {
        n: usize,
    },
    /// Block-union example; `a` and `b` fall back to the default sequences.
    Block {
        k: usize,
        #[serde(default)]
        a: Option<Vec<f64>>,
        #[serde(default)]
        b: Option<Vec<u64>>,
    },
    Explicit {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// I.i.d. uniform letters (full shifts only).
    Uniform,
    /// I.i.d. letters with the given probabilities.
    Product { weights: Vec<f64> },
    /// Point mass on a constant word.
    Dirac { letter: u16 },
    /// Uniform letters on blocks of a block system, `weights` as `[k, t_k]`.
    Blocks { t0: f64, weights: Vec<(usize, f64)> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountSpec {
    Separated,
    Spanning,
    OpenBallCover,
    ClosedBallCover,
}

impl From<CountSpec> for CountKind {
    fn from(c: CountSpec) -> Self {
        match c {
            CountSpec::Separated => CountKind::Separated,
            CountSpec::Spanning => CountKind::Spanning,
            CountSpec::OpenBallCover => CountKind::OpenBallCover,
            CountSpec::ClosedBallCover => CountKind::ClosedBallCover,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantSpec {
    Lp,
    Wp(f64),
}

impl From<QuantSpec> for QuantKind {
    fn from(q: QuantSpec) -> Self {
        match q {
            QuantSpec::Lp => QuantKind::LP,
            QuantSpec::Wp(p) => QuantKind::Wp(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallSpec {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Quantity {
    /// One of the four covering counts on the Bowen lift.
    Count { kind: CountSpec },
    /// Box count of the alphabet itself; `n` is ignored.
    Box,
    Quantization { kind: QuantSpec },
    Katok {
        #[serde(default = "open_ball")]
        ball: BallSpec,
    },
    /// Averaged Brin-Katok value on the lift.
    BrinKatok,
}

fn open_ball() -> BallSpec {
    BallSpec::Open
}

impl Quantity {
    pub fn label(&self) -> String {
        match self {
            Quantity::Count { kind } => CountKind::from(*kind).symbol().to_string(),
            Quantity::Box => "N_box".into(),
            Quantity::Quantization { kind } => QuantKind::from(*kind).label(),
            Quantity::Katok { ball: BallSpec::Open } => "katok".into(),
            Quantity::Katok { ball: BallSpec::Closed } => "katok_closed".into(),
            Quantity::BrinKatok => "brin_katok".into(),
        }
    }

    /// Whether values are counts (fitted on a log scale) rather than rates.
    pub fn is_count(&self) -> bool {
        !matches!(self, Quantity::BrinKatok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    #[serde(default)]
    pub half_width: usize,
    #[serde(default = "uniform")]
    pub measure: MeasureSpec,
    pub quantity: Quantity,
    /// Strictly decreasing scales.
    pub eps: Vec<f64>,
    #[serde(default = "default_horizons")]
    pub n: Vec<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn uniform() -> MeasureSpec {
    MeasureSpec::Uniform
}

fn default_horizons() -> Vec<usize> {
    vec![1, 2, 3]
}

fn default_delta() -> f64 {
    0.1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).context("invalid experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.eps.is_empty(), "eps ladder is empty");
        ensure!(
            self.eps.iter().all(|e| e.is_finite() && *e > 0.0),
            "eps values must be positive"
        );
        ensure!(
            self.eps.windows(2).all(|w| w[1] < w[0]),
            "eps ladder must be strictly decreasing"
        );
        ensure!(!self.n.is_empty(), "n range is empty");
        ensure!(self.n.iter().all(|&n| n >= 1), "n values must be at least 1");
        ensure!(self.n.windows(2).all(|w| w[0] < w[1]), "n values must be strictly increasing");
        ensure!(
            self.budget.max_states > 0 && self.budget.max_nodes > 0,
            "budgets must be positive"
        );
        if matches!(self.quantity, Quantity::Katok { .. }) {
            ensure!(self.delta > 0.0 && self.delta < 1.0, "delta must lie in (0, 1)");
        }
        if let Quantity::Quantization { kind: QuantSpec::Wp(p) } = self.quantity {
            ensure!(p.is_finite() && p >= 1.0, "p must lie in [1, inf)");
        }
        if matches!(self.quantity, Quantity::Box) && !matches!(self.system, SystemSpec::Grid { .. } | SystemSpec::Reciprocal { .. } | SystemSpec::Explicit { .. }) {
            bail!("box counts need a grid, reciprocal or explicit alphabet");
        }
        Ok(())
    }

    pub fn system(&self) -> Result<SymbolicSystem> {
        let full = |a: MetricAlphabet| SymbolicSystem::full_shift(a, self.half_width);
        Ok(match &self.system {
            SystemSpec::Grid { m } => full(make_grid_alphabet(*m)?),
            SystemSpec::Reciprocal { n } => full(make_reciprocal_alphabet(*n)?),
            SystemSpec::Explicit { values } => full(MetricAlphabet::new(values.clone())?),
            SystemSpec::Block { k, a, b } => {
                let a_rule = a.as_deref().map_or(ParamRule::PaperDefault, ParamRule::Explicit);
                let b_rule = b.as_deref().map_or(ParamRule::PaperDefault, ParamRule::Explicit);
                make_block_system(*k, a_rule, b_rule, self.half_width)?
            }
        })
    }

    pub fn measure(&self, sys: &SymbolicSystem) -> Result<MeasureRule> {
        let len = sys.alphabet().len();
        let rule = match &self.measure {
            MeasureSpec::Uniform => MeasureRule::Product(LetterDist::uniform(len)),
            MeasureSpec::Product { weights } => MeasureRule::Product(LetterDist(weights.clone())),
            MeasureSpec::Dirac { letter } => MeasureRule::Constant(*letter),
            MeasureSpec::Blocks { t0, weights } => {
                ComponentDecomposition::uniform_blocks(sys, *t0, weights)?.rule(sys)?
            }
        };
        rule.validate(len)?;
        Ok(rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_filled_and_echoed() {
        let cfg = ExperimentConfig::from_json(
            r#"{"system": {"kind": "grid", "m": 2}, "quantity": {"family": "box"}, "eps": [0.5, 0.25]}"#,
        )
        .unwrap();
        assert_eq!(cfg.n, vec![1, 2, 3]);
        assert_eq!(cfg.budget, Budget::default());
        let echoed = serde_json::to_value(&cfg).unwrap();
        assert_eq!(echoed["delta"], 0.1);
        assert_eq!(echoed["method"], "exact");
        assert_eq!(echoed["measure"]["kind"], "uniform");
    }

    #[test]
    fn rejects_bad_ladders_and_fields() {
        let bad = [
            r#"{"system": {"kind": "grid", "m": 2}, "quantity": {"family": "box"}, "eps": [0.25, 0.5]}"#,
            r#"{"system": {"kind": "grid", "m": 2}, "quantity": {"family": "box"}, "eps": []}"#,
            r#"{"system": {"kind": "grid", "m": 2}, "quantity": {"family": "box"}, "eps": [0.5], "bogus": 1}"#,
            r#"{"system": {"kind": "grid", "m": 2}, "quantity": {"family": "box"}, "eps": [0.5], "budget": {"max_nodes": 0}}"#,
        ];
        for text in bad {
            assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn quantity_spellings() {
        let q: Quantity = serde_json::from_str(r#"{"family": "quantization", "kind": {"wp": 2.0}}"#).unwrap();
        assert_eq!(q.label(), "Q_W2");
        let q: Quantity = serde_json::from_str(r#"{"family": "count", "kind": "open_ball_cover"}"#).unwrap();
        assert_eq!(q.label(), "N");
        let q: Quantity = serde_json::from_str(r#"{"family": "katok"}"#).unwrap();
        assert_eq!(q, Quantity::Katok { ball: BallSpec::Open });
    }
}
