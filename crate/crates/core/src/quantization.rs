//! Static and dynamical quantization numbers.
//!
//! `W_p`: fewest centers (space points) whose distortion `sum mu(x) d(x, F)^p`
//! is at most `eps^p`. `LP`: fewest closed `eps`-balls holding mass `>= 1 - eps`,
//! never fewer than one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{Budget, NodeMeter};
use crate::covering::balls;
use crate::error::{invalid, Result};
use crate::measures::{FiniteMeasure, MeasureRule};
use crate::metric::{exhaustive_lift, FiniteMetricSpace};
use crate::solvers::cover::{self, canonical_mass, MassThreshold};
use crate::solvers::pmedian;
use crate::systems::SymbolicSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuantKind {
    Wp(f64),
    LP,
}

impl QuantKind {
    pub fn label(self) -> String {
        match self {
            QuantKind::Wp(p) => format!("Q_W{p}"),
            QuantKind::LP => "Q_LP".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuantMethod {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationResult {
    pub value: usize,
    pub centers: Vec<usize>,
    /// Distortion `sum mu(x) d(x, F)^p` for `W_p`; covered mass for `LP`.
    pub objective: f64,
    pub exact: bool,
}

/// `Q_{mu, D}(eps)` on a finite space.
pub fn quantization_number(
    mu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    eps: f64,
    kind: QuantKind,
    method: QuantMethod,
    budget: &Budget,
) -> Result<QuantizationResult> {
    mu.check_space(space)?;
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    let exact = method == QuantMethod::Exact;
    let support = mu.support();
    match kind {
        QuantKind::Wp(p) => {
            if !(p >= 1.0) || !p.is_finite() {
                return invalid(format!("p must lie in [1, inf), got {p}"));
            }
            let weights: Vec<f64> = support.iter().map(|&x| mu.weight(x)).collect();
            let pow = |d: f64| if p == 1.0 { d } else { d.powf(p) };
            let cost: Vec<f64> = (0..space.len())
                .flat_map(|c| support.iter().map(move |&x| (c, x)))
                .map(|(c, x)| pow(space.dist(c, x)))
                .collect();
            let inst = pmedian::Instance {
                weights: &weights,
                cost: &cost,
                centers: space.len(),
            };
            let target = pow(eps);
            let centers = if eps >= space.diam() {
                vec![support[0]]
            } else if exact {
                let mut meter = NodeMeter::new(budget.max_nodes);
                pmedian::solve(&inst, target, &mut meter)?
            } else {
                pmedian::greedy(&inst, target)
            };
            Ok(QuantizationResult {
                value: centers.len(),
                objective: inst.objective(&centers),
                centers,
                exact,
            })
        }
        QuantKind::LP => {
            let sets = balls(space, eps, true);
            let threshold = MassThreshold::at_least(1.0 - eps);
            let mut centers = if exact {
                let mut meter = NodeMeter::new(budget.max_nodes);
                cover::min_partial_cover(&sets, mu.weights(), threshold, &mut meter)?
            } else {
                cover::greedy_partial_cover(&sets, mu.weights(), threshold)
            }
            .expect("all balls together hold the full mass");
            if centers.is_empty() {
                // a quantizer needs at least one atom
                centers.push(support[0]);
            }
            let mut union = sets[centers[0]].clone();
            for &c in &centers[1..] {
                union.union_with(&sets[c]);
            }
            Ok(QuantizationResult {
                value: centers.len(),
                objective: canonical_mass(&union, mu.weights()),
                centers,
                exact,
            })
        }
    }
}

/// `n -> Q_{mu, D_n}(eps)` over a range of horizons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantCurve {
    pub kind: QuantKind,
    pub eps: f64,
    pub entries: Vec<(usize, usize)>,
    pub exact: bool,
}

impl QuantCurve {
    pub fn as_counts(&self) -> Vec<(usize, f64)> {
        self.entries.iter().map(|&(n, q)| (n, q as f64)).collect()
    }
}

/// Quantization numbers of `rule` on the Bowen lifts `(X, d_n)` for each `n` in `ns`.
pub fn dynamical_quantization_curve(
    sys: &SymbolicSystem,
    rule: &MeasureRule,
    eps: f64,
    kind: QuantKind,
    ns: &[usize],
    method: QuantMethod,
    budget: &Budget,
) -> Result<QuantCurve> {
    let entries = ns
        .par_iter()
        .map(|&n| {
            let space = exhaustive_lift(sys, n, budget)?;
            let mu = rule.on_space(&space)?;
            let q = quantization_number(&mu, &space, eps, kind, method, budget)?;
            Ok((n, q.value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantCurve {
        kind,
        eps,
        entries,
        exact: method == QuantMethod::Exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{make_grid_alphabet, LetterDist};

    fn q(mu: &FiniteMeasure, s: &FiniteMetricSpace, eps: f64, kind: QuantKind) -> usize {
        quantization_number(mu, s, eps, kind, QuantMethod::Exact, &Budget::default())
            .unwrap()
            .value
    }

    #[test]
    fn documented_values() {
        let s = FiniteMetricSpace::line(&[0.0, 1.0]).unwrap();
        let mu = FiniteMeasure::uniform(&s);
        assert_eq!(q(&mu, &s, 0.4, QuantKind::Wp(1.0)), 2);
        assert_eq!(q(&mu, &s, 1.0, QuantKind::Wp(1.0)), 1);
        assert_eq!(q(&mu, &s, 1.0, QuantKind::Wp(3.0)), 1);
        let s3 = FiniteMetricSpace::line(&[0.0, 0.5, 1.0]).unwrap();
        let u3 = FiniteMeasure::uniform(&s3);
        assert_eq!(q(&u3, &s3, 0.3, QuantKind::LP), 3);
        for eps in [0.01, 0.3, 0.9, 2.0] {
            let d = FiniteMeasure::dirac(&s3, 2).unwrap();
            assert_eq!(q(&d, &s3, eps, QuantKind::LP), 1);
            assert_eq!(q(&d, &s3, eps, QuantKind::Wp(2.0)), 1);
        }
    }

    #[test]
    fn witnesses_meet_the_target() {
        let s = FiniteMetricSpace::line(&[0.0, 0.1, 0.35, 0.4, 0.8, 1.0]).unwrap();
        let mu = FiniteMeasure::new(&s, vec![0.125, 0.25, 0.125, 0.25, 0.125, 0.125]).unwrap();
        for eps in [0.05, 0.1, 0.2, 0.4] {
            for method in [QuantMethod::Exact, QuantMethod::Greedy] {
                let b = Budget::default();
                let w = quantization_number(&mu, &s, eps, QuantKind::Wp(2.0), method, &b).unwrap();
                assert!(w.objective <= eps * eps);
                assert_eq!(w.centers.len(), w.value);
                let l = quantization_number(&mu, &s, eps, QuantKind::LP, method, &b).unwrap();
                assert!(l.objective >= 1.0 - eps);
            }
        }
    }

    #[test]
    fn curve_for_constant_word() {
        let sys = SymbolicSystem::full_shift(make_grid_alphabet(2).unwrap(), 0);
        let rule = MeasureRule::Product(LetterDist::dirac(2, 0));
        let c = dynamical_quantization_curve(
            &sys,
            &rule,
            0.3,
            QuantKind::LP,
            &[1, 2, 3],
            QuantMethod::Exact,
            &Budget::default(),
        )
        .unwrap();
        assert!(c.entries.iter().all(|e| e.1 == 1));
    }
}
