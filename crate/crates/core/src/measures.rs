//! Finitely supported probability measures on a [`FiniteMetricSpace`].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::{FiniteMetricSpace, Point, Word};
use crate::systems::{Constraint, LetterDist, SymbolicSystem};

/// Allowed deviation of the total mass from 1.
pub const MASS_TOL: f64 = 1e-12;

/// Probability weights indexed by the points of one space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMeasure {
    space_id: u64,
    weights: Vec<f64>,
}

impl FiniteMeasure {
    pub fn new(space: &FiniteMetricSpace, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return invalid(format!(
                "{} weights for a space of {} points",
                weights.len(),
                space.len()
            ));
        }
        FiniteMeasure::from_parts(space.id(), weights)
    }

    fn from_parts(space_id: u64, weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return invalid(format!("weight {w} is not a nonnegative number"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(FiniteMeasure { space_id, weights })
    }

    pub fn dirac(space: &FiniteMetricSpace, point: usize) -> Result<Self> {
        if point >= space.len() {
            return invalid(format!("point {point} outside a space of {}", space.len()));
        }
        let mut w = vec![0.0; space.len()];
        w[point] = 1.0;
        FiniteMeasure::new(space, w)
    }

    pub fn uniform(space: &FiniteMetricSpace) -> Self {
        let p = space.len();
        FiniteMeasure {
            space_id: space.id(),
            weights: vec![1.0 / p as f64; p],
        }
    }

    pub fn space_id(&self) -> u64 {
        self.space_id
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Indices with positive weight, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    pub fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        if self.space_id != space.id() {
            return Err(Error::SpaceMismatch(self.space_id, space.id()));
        }
        Ok(())
    }

    fn same_space(&self, other: &FiniteMeasure) -> Result<()> {
        if self.space_id != other.space_id {
            return Err(Error::SpaceMismatch(self.space_id, other.space_id));
        }
        Ok(())
    }
}

/// Open (`< eps`) or closed (`<= eps`) balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BallKind {
    Open,
    Closed,
}

impl BallKind {
    #[inline]
    pub fn contains(self, d: f64, eps: f64) -> bool {
        match self {
            BallKind::Open => d < eps,
            BallKind::Closed => d <= eps,
        }
    }
}

/// Product of `nu` over every coordinate of each word in a lifted space.
/// Fails when the space is not the full set of admissible words.
pub fn product_measure(space: &FiniteMetricSpace, nu: &LetterDist) -> Result<FiniteMeasure> {
    MeasureRule::Product(nu.clone()).on_space(space)
}

/// Pointwise convex combination `sum t_i mu_i`.
pub fn convex_combine(parts: &[(f64, &FiniteMeasure)]) -> Result<FiniteMeasure> {
    let Some((_, first)) = parts.first() else {
        return invalid("empty mixture");
    };
    if parts.iter().any(|(t, _)| !(*t > 0.0)) {
        return invalid("mixture weights must be positive");
    }
    for (_, m) in parts {
        first.same_space(m)?;
    }
    let total: f64 = parts.iter().map(|p| p.0).sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::NotNormalized(total));
    }
    let weights = (0..first.weights.len())
        .map(|i| parts.iter().map(|(t, m)| t * m.weights[i]).sum())
        .collect();
    FiniteMeasure::from_parts(first.space_id, weights)
}

/// `mu >= t nu` atom by atom.
pub fn dominates(mu: &FiniteMeasure, nu: &FiniteMeasure, t: f64) -> Result<bool> {
    mu.same_space(nu)?;
    if !(t > 0.0 && t <= 1.0) {
        return invalid(format!("t must lie in (0, 1], got {t}"));
    }
    Ok(mu.weights.iter().zip(&nu.weights).all(|(m, n)| *m >= t * n))
}

/// Mass of the ball of radius `eps` around `center`, summed in index order.
pub fn ball_mass(
    mu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    center: usize,
    eps: f64,
    kind: BallKind,
) -> Result<f64> {
    mu.check_space(space)?;
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    Ok(space
        .row(center)
        .iter()
        .zip(&mu.weights)
        .filter(|(d, _)| kind.contains(**d, eps))
        .map(|(_, w)| *w)
        .sum())
}

/// Recipe that assigns a weight to every word, for any time horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeasureRule {
    /// I.i.d. letters.
    Product(LetterDist),
    /// Point mass on the constant word.
    Constant(u16),
    /// Convex combination of rules.
    Mixture(Vec<(f64, MeasureRule)>),
}

impl MeasureRule {
    pub fn word_weight(&self, word: &Word) -> f64 {
        match self {
            MeasureRule::Product(nu) => word.letters().iter().map(|&l| nu.0[l as usize]).product(),
            MeasureRule::Constant(c) => {
                if word.letters().iter().all(|l| l == c) {
                    1.0
                } else {
                    0.0
                }
            }
            MeasureRule::Mixture(parts) => parts.iter().map(|(t, r)| t * r.word_weight(word)).sum(),
        }
    }

    /// Measure on a space whose points are words.
    pub fn on_space(&self, space: &FiniteMetricSpace) -> Result<FiniteMeasure> {
        let weights = space
            .points()
            .iter()
            .map(|p| match p {
                Point::Word(w) => Ok(self.word_weight(w)),
                _ => invalid("measure rules apply to spaces of words"),
            })
            .collect::<Result<Vec<f64>>>()?;
        FiniteMeasure::new(space, weights)
    }

    /// Validate letter distributions against an alphabet size.
    pub fn validate(&self, alphabet_len: usize) -> Result<()> {
        match self {
            MeasureRule::Product(nu) => nu.validate(alphabet_len),
            MeasureRule::Constant(c) if (*c as usize) < alphabet_len => Ok(()),
            MeasureRule::Constant(c) => invalid(format!("letter {c} outside the alphabet")),
            MeasureRule::Mixture(parts) => {
                let total: f64 = parts.iter().map(|p| p.0).sum();
                if parts.iter().any(|p| !(p.0 > 0.0)) || (total - 1.0).abs() > MASS_TOL {
                    return invalid("mixture weights must be positive and sum to 1");
                }
                parts.iter().try_for_each(|p| p.1.validate(alphabet_len))
            }
        }
    }
}

/// Explicit decomposition `mu = t_0 delta_{1^Z} + sum_k t_k mu_k` for a block system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    pub t0: f64,
    /// `(block index k >= 1, t_k, mu_k)`.
    pub components: Vec<(usize, f64, MeasureRule)>,
}

impl ComponentDecomposition {
    pub fn new(t0: f64, components: Vec<(usize, f64, MeasureRule)>) -> Result<Self> {
        let total = t0 + components.iter().map(|c| c.1).sum::<f64>();
        if t0 < 0.0 || components.iter().any(|c| !(c.1 > 0.0)) || (total - 1.0).abs() > MASS_TOL
        {
            return invalid("component weights must be nonnegative and sum to 1");
        }
        Ok(ComponentDecomposition { t0, components })
    }

    /// Uniform letters inside each listed block.
    pub fn uniform_blocks(sys: &SymbolicSystem, t0: f64, weights: &[(usize, f64)]) -> Result<Self> {
        let parts = weights
            .iter()
            .map(|&(k, t)| Ok((k, t, MeasureRule::Product(block_uniform(sys, k)?))))
            .collect::<Result<Vec<_>>>()?;
        ComponentDecomposition::new(t0, parts)
    }

    /// The mixture as a single rule.
    pub fn rule(&self, sys: &SymbolicSystem) -> Result<MeasureRule> {
        let mut parts: Vec<(f64, MeasureRule)> =
            self.components.iter().map(|(_, t, r)| (*t, r.clone())).collect();
        if self.t0 > 0.0 {
            parts.insert(0, (self.t0, MeasureRule::Constant(fixed_point(sys)?)));
        }
        Ok(MeasureRule::Mixture(parts))
    }

    /// Check each component lives on its own block.
    pub fn validate(&self, sys: &SymbolicSystem) -> Result<()> {
        for (k, _, rule) in &self.components {
            let letters = block_letters(sys, *k)?;
            let inside = |l: usize| letters.contains(&(l as u16));
            let ok = match rule {
                MeasureRule::Product(nu) => {
                    nu.0.iter().enumerate().all(|(l, p)| *p == 0.0 || inside(l))
                }
                MeasureRule::Constant(c) => inside(*c as usize),
                MeasureRule::Mixture(_) => false,
            };
            if !ok {
                return invalid(format!("component {k} charges letters outside block {k}"));
            }
        }
        Ok(())
    }
}

fn block_letters(sys: &SymbolicSystem, k: usize) -> Result<&[u16]> {
    match sys.constraint() {
        Constraint::BlockUnion { blocks, .. } if k >= 1 && k <= blocks.len() => Ok(&blocks[k - 1]),
        Constraint::BlockUnion { .. } => invalid(format!("no block {k}")),
        Constraint::FullShift => invalid("not a block system"),
    }
}

fn fixed_point(sys: &SymbolicSystem) -> Result<u16> {
    match sys.constraint() {
        Constraint::BlockUnion {
            fixed_point: Some(f),
            ..
        } => Ok(*f),
        _ => invalid("system has no fixed point letter"),
    }
}

/// Uniform distribution on the letters of block `k` (1-based).
pub fn block_uniform(sys: &SymbolicSystem, k: usize) -> Result<LetterDist> {
    let letters = block_letters(sys, k)?;
    let mut w = vec![0.0; sys.alphabet().len()];
    for &l in letters {
        w[l as usize] = 1.0 / letters.len() as f64;
    }
    Ok(LetterDist(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::metric::exhaustive_lift;
    use crate::systems::{make_block_system, make_grid_alphabet, ParamRule};

    fn line3() -> FiniteMetricSpace {
        FiniteMetricSpace::line(&[0.0, 0.5, 1.0]).unwrap()
    }

    #[test]
    fn product_examples() {
        let sys = SymbolicSystem::full_shift(make_grid_alphabet(2).unwrap(), 0);
        let s2 = exhaustive_lift(&sys, 2, &Budget::default()).unwrap();
        let mu = product_measure(&s2, &LetterDist::uniform(2)).unwrap();
        assert_eq!(mu.weights(), &[0.25; 4]);
        let s1 = exhaustive_lift(&sys, 1, &Budget::default()).unwrap();
        let mu = product_measure(&s1, &LetterDist(vec![0.25, 0.75])).unwrap();
        assert_eq!(mu.weights(), &[0.25, 0.75]);
        let d = product_measure(&s2, &LetterDist::dirac(2, 1)).unwrap();
        assert_eq!(d.support(), vec![3]);
    }

    #[test]
    fn product_on_partial_space_fails() {
        let sys = SymbolicSystem::full_shift(make_grid_alphabet(2).unwrap(), 0);
        let states = vec![Word::centered(0, vec![0, 0])];
        let s = crate::metric::bowen_lift(&sys, &states, 2).unwrap();
        assert!(product_measure(&s, &LetterDist::uniform(2)).is_err());
    }

    #[test]
    fn combine_and_dominate() {
        let s = line3();
        let x = FiniteMeasure::dirac(&s, 0).unwrap();
        let y = FiniteMeasure::dirac(&s, 2).unwrap();
        let mix = convex_combine(&[(0.5, &x), (0.5, &y)]).unwrap();
        assert_eq!(mix.weights(), &[0.5, 0.0, 0.5]);
        assert_eq!(convex_combine(&[(1.0, &x)]).unwrap(), x);
        assert!(dominates(&mix, &x, 0.5).unwrap());
        assert!(!dominates(&mix, &x, 0.75).unwrap());
        assert!(dominates(&x, &x, 1.0).unwrap());
        assert!(!dominates(&x, &y, 1e-9).unwrap());
        let other = FiniteMeasure::uniform(&line3());
        assert!(dominates(&x, &other, 0.5).is_err());
    }

    #[test]
    fn ball_mass_examples() {
        let s = line3();
        let mu = FiniteMeasure::uniform(&s);
        assert_eq!(ball_mass(&mu, &s, 1, 0.5, BallKind::Open).unwrap(), 1.0 / 3.0);
        assert!((ball_mass(&mu, &s, 1, 0.5, BallKind::Closed).unwrap() - 1.0).abs() < 1e-15);
        assert!((ball_mass(&mu, &s, 0, 2.0, BallKind::Open).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn block_decomposition() {
        let b = [2u64, 3];
        let sys = make_block_system(
            2,
            ParamRule::Explicit(&[0.0, 0.5, 0.8][..]),
            ParamRule::Explicit(&b[..]),
            0,
        )
        .unwrap();
        let dec = ComponentDecomposition::uniform_blocks(&sys, 0.25, &[(1, 0.5), (2, 0.25)])
            .unwrap();
        dec.validate(&sys).unwrap();
        let space = exhaustive_lift(&sys, 2, &Budget::default()).unwrap();
        let mu = dec.rule(&sys).unwrap().on_space(&space).unwrap();
        // 4 words of block 1 at 1/8, 9 of block 2 at 1/36, fixed point 1/4
        let w = mu.weights();
        assert_eq!(w.len(), 4 + 9 + 1);
        assert!(w[..4].iter().all(|&x| x == 0.125));
        assert!(w[4..13].iter().all(|&x| (x - 0.25 / 9.0).abs() < 1e-15));
        assert_eq!(w[13], 0.25);
    }
}
