//! Finite-horizon versions of the Katok, Shapira, Brin-Katok and Rényi entropies.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{Budget, NodeMeter};
use crate::covering::{balls, greedy_net};
use crate::error::{invalid, Error, Result};
use crate::estimators::{growth_rate, GrowthEstimate};
use crate::measures::{ball_mass, BallKind, ComponentDecomposition, FiniteMeasure, MeasureRule};
use crate::metric::{
    bowen_distance_unchecked, exhaustive_lift, FiniteMetricSpace, MetricAlphabet, Point, Word,
};
use crate::solvers::cover::{self, canonical_mass, MassThreshold};
use crate::systems::{enumerate_states, Constraint, Enumeration, LetterDist, SymbolicSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KatokNumber {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub ball_kind: BallKind,
    pub value: usize,
    pub centers: Vec<usize>,
    pub exact: bool,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("delta must lie in (0, 1), got {delta}"));
    }
    Ok(())
}

/// Fewest `eps`-balls of `space` whose union has mass strictly above `1 - delta`.
/// `n` is only recorded; `space` is expected to be the lift at that horizon.
#[allow(clippy::too_many_arguments)]
pub fn katok_on_space(
    mu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    n: usize,
    eps: f64,
    delta: f64,
    ball_kind: BallKind,
    exact: bool,
    budget: &Budget,
) -> Result<KatokNumber> {
    mu.check_space(space)?;
    check_delta(delta)?;
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    let sets = balls(space, eps, ball_kind == BallKind::Closed);
    let threshold = MassThreshold::above(1.0 - delta);
    let centers = if exact {
        let mut meter = NodeMeter::new(budget.max_nodes);
        cover::min_partial_cover(&sets, mu.weights(), threshold, &mut meter)?
    } else {
        cover::greedy_partial_cover(&sets, mu.weights(), threshold)
    }
    .ok_or_else(|| Error::Degenerate("total mass does not exceed 1 - delta".into()))?;
    Ok(KatokNumber {
        n,
        eps,
        delta,
        ball_kind,
        value: centers.len(),
        centers,
        exact,
    })
}

/// `N_mu(n, eps, delta)` on the exhaustive lift of `sys`.
#[allow(clippy::too_many_arguments)]
pub fn katok_number(
    sys: &SymbolicSystem,
    rule: &MeasureRule,
    n: usize,
    eps: f64,
    delta: f64,
    ball_kind: BallKind,
    exact: bool,
    budget: &Budget,
) -> Result<KatokNumber> {
    let space = exhaustive_lift(sys, n, budget)?;
    let mu = rule.on_space(&space)?;
    katok_on_space(&mu, &space, n, eps, delta, ball_kind, exact, budget)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KatokCurve {
    pub entries: Vec<KatokNumber>,
    pub fit: GrowthEstimate,
}

/// Katok numbers with open balls over `ns`, and the growth fit of their logs.
pub fn katok_growth(
    sys: &SymbolicSystem,
    rule: &MeasureRule,
    eps: f64,
    delta: f64,
    ns: &[usize],
    exact: bool,
    budget: &Budget,
) -> Result<KatokCurve> {
    let entries = ns
        .par_iter()
        .map(|&n| katok_number(sys, rule, n, eps, delta, BallKind::Open, exact, budget))
        .collect::<Result<Vec<_>>>()?;
    let counts: Vec<(usize, f64)> = entries.iter().map(|k| (k.n, k.value as f64)).collect();
    let fit = growth_rate(&counts, None)?;
    Ok(KatokCurve { entries, fit })
}

/// Restriction of `x` to the coordinates `[-W, n - 1 + W]`.
fn restrict(x: &Word, hw: usize, n: usize) -> Result<Word> {
    let first = -(hw as i64);
    let last = (n + hw) as i64 - 1;
    if x.first() > first || x.last() < last {
        return Err(Error::IndexRange(format!(
            "word over [{}, {}] does not cover [{first}, {last}]",
            x.first(),
            x.last()
        )));
    }
    let from = (first - x.first()) as usize;
    let to = (last - x.first()) as usize;
    Ok(Word::new(first, x.letters()[from..=to].to_vec()))
}

/// `mu(B_n(x, eps))` summed over every admissible word, without building the lift.
pub fn word_ball_mass(
    sys: &SymbolicSystem,
    rule: &MeasureRule,
    x: &Word,
    n: usize,
    eps: f64,
    kind: BallKind,
    budget: &Budget,
) -> Result<f64> {
    let hw = sys.half_width();
    let x = restrict(x, hw, n)?;
    let states = enumerate_states(sys, n, &Enumeration::Exhaustive, budget)?;
    Ok(states
        .iter()
        .filter(|y| kind.contains(bowen_distance_unchecked(sys.alphabet(), hw, &x, y, n), eps))
        .map(|y| rule.word_weight(y))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDecay {
    pub eps: f64,
    /// `(n, -ln mu(B_n(x, eps)) / n)`.
    pub entries: Vec<(usize, f64)>,
}

/// Decay rates `-(1/n) ln mu(B_n(x, eps))` with open balls.
pub fn brin_katok_local(
    sys: &SymbolicSystem,
    rule: &MeasureRule,
    x: &Word,
    eps: f64,
    ns: &[usize],
    budget: &Budget,
) -> Result<LocalDecay> {
    let entries = ns
        .iter()
        .map(|&n| {
            let m = word_ball_mass(sys, rule, x, n, eps, BallKind::Open, budget)?;
            if !(m > 0.0) {
                return Err(Error::ZeroBallMass { n });
            }
            Ok((n, -m.ln() / n as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalDecay { eps, entries })
}

/// `sum_x mu(x) * -(1/n) ln mu(B_n(x, eps))` on a lift at horizon `n`, open balls.
pub fn brin_katok_average(
    mu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    n: usize,
    eps: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for x in mu.support() {
        let m = ball_mass(mu, space, x, eps, BallKind::Open)?;
        total += mu.weight(x) * -m.ln();
    }
    Ok(total / n as f64)
}

/// Bracket `(lower, upper)` of `mu(B_n(x, eps))` for the product measure of `nu`.
///
/// Upper: the ball forces `|y_j - x_j| < eps` at the centre of every window `j < n`.
/// Lower: agreement within `eps / 4` on every coordinate of `[-W, n - 1 + W]`
/// keeps each window distance below `(3 - 2^{1-W}) eps / 4 < eps`.
pub fn product_ball_bounds(
    sys: &SymbolicSystem,
    nu: &LetterDist,
    x: &Word,
    n: usize,
    eps: f64,
) -> Result<(f64, f64)> {
    nu.validate(sys.alphabet().len())?;
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    if n == 0 {
        return Ok((1.0, 1.0));
    }
    let hw = sys.half_width();
    let x = restrict(x, hw, n)?;
    let a = sys.alphabet();
    let near = |letter: u16, r: f64| -> f64 {
        let v = a.value(letter);
        a.values()
            .iter()
            .zip(&nu.0)
            .filter(|(u, _)| (*u - v).abs() < r)
            .map(|(_, p)| *p)
            .sum()
    };
    let upper = (0..n as i64).map(|j| near(x.at(j).expect("restricted"), eps)).product();
    let lower = x.letters().iter().map(|&l| near(l, eps / 4.0)).product();
    Ok((lower, upper))
}

/// A finite cover of a space, with certified diameter and Lebesgue number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub space_id: u64,
    pub members: Vec<Vec<usize>>,
    /// Largest member diameter.
    pub diam: f64,
    /// Every open ball of this radius lies inside some member.
    pub leb: f64,
}

impl CoverSpec {
    /// Check the members cover the space and compute diameter and Lebesgue number.
    pub fn certify(space: &FiniteMetricSpace, members: Vec<Vec<usize>>) -> Result<Self> {
        let p = space.len();
        let mut seen = vec![false; p];
        for m in &members {
            for &i in m {
                if i >= p {
                    return invalid(format!("member point {i} outside the space"));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return invalid(format!("point {i} is not covered"));
        }
        let diam = members
            .iter()
            .flat_map(|m| m.iter().flat_map(move |&i| m.iter().map(move |&j| (i, j))))
            .map(|(i, j)| space.dist(i, j))
            .fold(0.0, f64::max);
        // B(x, r) sits inside U iff r <= d(x, outside U); an empty outside never binds.
        let bound = space.diam() + 1.0;
        let inside: Vec<FixedBitSet> = members
            .iter()
            .map(|m| {
                let mut b = FixedBitSet::with_capacity(p);
                m.iter().for_each(|&i| b.insert(i));
                b
            })
            .collect();
        let leb = (0..p)
            .map(|x| {
                inside
                    .iter()
                    .map(|u| {
                        (0..p)
                            .filter(|&y| !u.contains(y))
                            .map(|y| space.dist(x, y))
                            .fold(bound, f64::min)
                    })
                    .fold(0.0, f64::max)
            })
            .fold(bound, f64::min);
        Ok(CoverSpec {
            space_id: space.id(),
            members,
            diam,
            leb,
        })
    }
}

/// Cover by open `eps/2`-balls around a greedy `eps/4`-net: diameter below `eps`
/// and Lebesgue number at least `eps/4`. Finer nets are tried if certification
/// ever disagrees.
pub fn generate_cover(space: &FiniteMetricSpace, eps: f64) -> Result<CoverSpec> {
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    let mut scale = eps / 4.0;
    for _ in 0..8 {
        let members: Vec<Vec<usize>> = greedy_net(space, scale, 0)
            .into_iter()
            .map(|c| (0..space.len()).filter(|&y| space.dist(c, y) < eps / 2.0).collect())
            .collect();
        let spec = CoverSpec::certify(space, members)?;
        if spec.diam < eps && spec.leb >= eps / 4.0 {
            return Ok(spec);
        }
        scale /= 2.0;
    }
    Err(Error::Degenerate(format!("no certified cover found at eps = {eps}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapiraNumber {
    pub n: usize,
    pub delta: f64,
    pub value: usize,
    /// Nonempty cells of the join.
    pub cells: usize,
    pub exact: bool,
}

/// Fewest cells of the join `U v T^-1 U v ... v T^-(n-1) U` with mass above `1 - delta`.
///
/// `cover` lives on `window_space`, the horizon-1 lift whose points are the
/// admissible windows `[-W, W]`.
#[allow(clippy::too_many_arguments)]
pub fn shapira_number(
    sys: &SymbolicSystem,
    window_space: &FiniteMetricSpace,
    cover: &CoverSpec,
    rule: &MeasureRule,
    n: usize,
    delta: f64,
    exact: bool,
    budget: &Budget,
) -> Result<ShapiraNumber> {
    check_delta(delta)?;
    if cover.space_id != window_space.id() {
        return Err(Error::SpaceMismatch(cover.space_id, window_space.id()));
    }
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let hw = sys.half_width();
    let width = 2 * hw + 1;
    let mut index: HashMap<&[u16], usize> = HashMap::new();
    for (i, p) in window_space.points().iter().enumerate() {
        match p {
            Point::Word(w) if w.len() == width => {
                index.insert(w.letters(), i);
            }
            _ => return invalid("window space must hold words of width 2W + 1"),
        }
    }
    let states = enumerate_states(sys, n, &Enumeration::Exhaustive, budget)?;
    let weights: Vec<f64> = states.iter().map(|y| rule.word_weight(y)).collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > crate::measures::MASS_TOL {
        return Err(Error::NotNormalized(total));
    }
    let s = states.len();
    // level[j][u] = states whose j-th window lies in member u
    let mut level = vec![vec![FixedBitSet::with_capacity(s); cover.members.len()]; n];
    let mut members_of = vec![Vec::new(); window_space.len()];
    for (u, m) in cover.members.iter().enumerate() {
        for &w in m {
            members_of[w].push(u);
        }
    }
    for (yi, y) in states.iter().enumerate() {
        for (j, row) in level.iter_mut().enumerate() {
            let w = index[&y.letters()[j..j + width]];
            for &u in &members_of[w] {
                row[u].insert(yi);
            }
        }
    }
    let mut cells = Vec::new();
    let mut all = FixedBitSet::with_capacity(s);
    all.insert_range(..);
    join_cells(&level, 0, all, &mut cells, budget.max_states)?;
    let threshold = MassThreshold::above(1.0 - delta);
    let chosen = if exact {
        let mut meter = NodeMeter::new(budget.max_nodes);
        cover::min_partial_cover(&cells, &weights, threshold, &mut meter)?
    } else {
        cover::greedy_partial_cover(&cells, &weights, threshold)
    }
    .ok_or_else(|| Error::Degenerate("join cells miss mass".into()))?;
    Ok(ShapiraNumber {
        n,
        delta,
        value: chosen.len(),
        cells: cells.len(),
        exact,
    })
}

fn join_cells(
    level: &[Vec<FixedBitSet>],
    j: usize,
    current: FixedBitSet,
    out: &mut Vec<FixedBitSet>,
    cap: usize,
) -> Result<()> {
    if j == level.len() {
        if out.len() >= cap {
            return Err(Error::BudgetExceeded {
                what: "join cells",
                limit: cap as u64,
            });
        }
        out.push(current);
        return Ok(());
    }
    for member in &level[j] {
        let mut next = current.clone();
        next.intersect_with(member);
        if !next.is_clear() {
            join_cells(level, j + 1, next, out, cap)?;
        }
    }
    Ok(())
}

/// Cell of `v` in the partition of `[0, 1]` into `m` intervals `[i/m, (i+1)/m)`,
/// with the last one closed at 1.
pub fn partition_cell(v: f64, m: usize) -> usize {
    ((v * m as f64).floor() as usize).min(m - 1)
}

/// Measure on sequences for which the coordinate-partition entropy has a closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RenyiSpec {
    /// I.i.d. letters with values in `[0, 1]`.
    Product { values: Vec<f64>, nu: LetterDist },
    /// Convex combination; `h_mu(P)` is affine in `mu`.
    Mixture(Vec<(f64, RenyiSpec)>),
}

fn shannon(p: impl Iterator<Item = f64>) -> f64 {
    p.filter(|&q| q > 0.0).map(|q| -q * q.ln()).sum()
}

/// `h_mu(P_m)` in closed form.
pub fn renyi_partition_entropy(spec: &RenyiSpec, m: usize) -> Result<f64> {
    if m == 0 {
        return invalid("m must be at least 1");
    }
    match spec {
        RenyiSpec::Product { values, nu } => {
            nu.validate(values.len())?;
            let mut cells = vec![0.0; m];
            for (v, p) in values.iter().zip(&nu.0) {
                if !(0.0..=1.0).contains(v) {
                    return invalid(format!("value {v} outside [0, 1]"));
                }
                cells[partition_cell(*v, m)] += p;
            }
            Ok(shannon(cells.into_iter()))
        }
        RenyiSpec::Mixture(parts) => {
            let total: f64 = parts.iter().map(|p| p.0).sum();
            if parts.iter().any(|p| !(p.0 > 0.0)) || (total - 1.0).abs() > 1e-12 {
                return invalid("mixture weights must be positive and sum to 1");
            }
            parts
                .iter()
                .map(|(t, s)| Ok(t * renyi_partition_entropy(s, m)?))
                .sum()
        }
    }
}

/// Plug-in `H_mu(P_m^n) / n` on a lift at horizon `n` (coordinates `0..n`).
pub fn renyi_plugin(
    mu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    alphabet: &MetricAlphabet,
    m: usize,
    n: usize,
) -> Result<f64> {
    mu.check_space(space)?;
    if m == 0 || n == 0 {
        return invalid("m and n must be at least 1");
    }
    let mut cells: HashMap<Vec<usize>, f64> = HashMap::new();
    for i in mu.support() {
        let Point::Word(w) = &space.points()[i] else {
            return invalid("plug-in entropy needs a space of words");
        };
        let key = (0..n as i64)
            .map(|j| {
                w.at(j)
                    .map(|l| partition_cell(alphabet.value(l), m))
                    .ok_or_else(|| Error::IndexRange(format!("word lacks coordinate {j}")))
            })
            .collect::<Result<Vec<_>>>()?;
        *cells.entry(key).or_insert(0.0) += mu.weight(i);
    }
    let mut masses: Vec<(Vec<usize>, f64)> = cells.into_iter().collect();
    masses.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(shannon(masses.into_iter().map(|c| c.1)) / n as f64)
}

/// Whether open `eps`-balls of every horizon are single words: any differing
/// coordinate in a window already costs at least `2^-W` times the smallest gap.
pub fn cylinder_regime(sys: &SymbolicSystem, eps: f64) -> bool {
    let a = sys.alphabet();
    a.len() == 1 || eps <= a.min_gap() * 0.5f64.powi(sys.half_width() as i32)
}

/// Product components of a block decomposition, as `(t, nu)` with the fixed point first.
fn component_laws(sys: &SymbolicSystem, dec: &ComponentDecomposition) -> Result<Vec<(f64, LetterDist)>> {
    dec.validate(sys)?;
    let len = sys.alphabet().len();
    let mut out = Vec::new();
    if dec.t0 > 0.0 {
        let Constraint::BlockUnion {
            fixed_point: Some(f),
            ..
        } = sys.constraint()
        else {
            return invalid("system has no fixed point");
        };
        out.push((dec.t0, LetterDist::dirac(len, *f)));
    }
    for (_, t, rule) in &dec.components {
        match rule {
            MeasureRule::Product(nu) => out.push((*t, nu.clone())),
            MeasureRule::Constant(c) => out.push((*t, LetterDist::dirac(len, *c))),
            MeasureRule::Mixture(_) => return invalid("components must be product measures"),
        }
    }
    Ok(out)
}

fn require_cylinders(sys: &SymbolicSystem, eps: f64) -> Result<()> {
    if !(eps > 0.0) || !cylinder_regime(sys, eps) {
        return invalid(format!("eps = {eps} is outside the single-word ball regime"));
    }
    Ok(())
}

/// Averaged Brin-Katok value at horizon `n` for a block mixture in the cylinder
/// regime: balls are single words, so it is the word entropy over `n + 2W`
/// coordinates divided by `n`. Components live on disjoint blocks, which gives
/// `(sum_k t_k (n + 2W) H(nu_k) + H(t)) / n`.
pub fn block_brin_katok_average(
    sys: &SymbolicSystem,
    dec: &ComponentDecomposition,
    n: usize,
    eps: f64,
) -> Result<f64> {
    require_cylinders(sys, eps)?;
    let laws = component_laws(sys, dec)?;
    let len = sys.word_len(n) as f64;
    let inner: f64 = laws.iter().map(|(t, nu)| t * len * shannon(nu.0.iter().copied())).sum();
    let mix = shannon(laws.iter().map(|l| l.0));
    Ok((inner + mix) / n as f64)
}

/// Katok number of a block mixture with uniform components in the cylinder
/// regime: heaviest words first until the mass exceeds `1 - delta`.
pub fn block_katok_count(
    sys: &SymbolicSystem,
    dec: &ComponentDecomposition,
    n: usize,
    eps: f64,
    delta: f64,
) -> Result<f64> {
    require_cylinders(sys, eps)?;
    check_delta(delta)?;
    let len = sys.word_len(n) as i32;
    // (mass of one word, number of words) per component
    let mut groups = Vec::new();
    for (t, nu) in component_laws(sys, dec)? {
        let support: Vec<f64> = nu.0.iter().copied().filter(|&p| p > 0.0).collect();
        if support.iter().any(|&p| p != support[0]) {
            return invalid("components must be uniform on their letters");
        }
        let b = support.len() as f64;
        groups.push((t * b.powi(-len), b.powi(len)));
    }
    groups.sort_by(|a, b| b.0.total_cmp(&a.0));
    let need = 1.0 - delta;
    let mut mass = 0.0;
    let mut count = 0.0;
    for (w, c) in groups {
        if mass + w * c > need {
            return Ok(count + ((need - mass) / w).floor() + 1.0);
        }
        mass += w * c;
        count += c;
    }
    Err(Error::Degenerate("total mass does not exceed 1 - delta".into()))
}

/// Mass of the coordinates-`[-W, n-1+W]` cylinder of `x` under the mixture.
pub fn cylinder_mass(sys: &SymbolicSystem, rule: &MeasureRule, x: &Word, n: usize) -> Result<f64> {
    Ok(rule.word_weight(&restrict(x, sys.half_width(), n)?))
}

/// Total mass of a set of lift points, summed by index.
pub fn covered_mass(mu: &FiniteMeasure, points: &[usize]) -> f64 {
    let mut set = FixedBitSet::with_capacity(mu.weights().len());
    points.iter().for_each(|&i| set.insert(i));
    canonical_mass(&set, mu.weights())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{make_block_system, make_grid_alphabet, ParamRule};

    fn binary(w: usize) -> SymbolicSystem {
        SymbolicSystem::full_shift(make_grid_alphabet(2).unwrap(), w)
    }

    fn bernoulli() -> MeasureRule {
        MeasureRule::Product(LetterDist::uniform(2))
    }

    #[test]
    fn katok_examples() {
        let b = Budget::default();
        let k = katok_number(&binary(0), &bernoulli(), 2, 0.5, 0.3, BallKind::Open, true, &b)
            .unwrap();
        assert_eq!(k.value, 3);
        // tiny delta recovers the full cover count
        let full = katok_number(&binary(0), &bernoulli(), 2, 0.5, 1e-9, BallKind::Open, true, &b)
            .unwrap();
        assert_eq!(full.value, 4);
        let dirac = MeasureRule::Product(LetterDist::dirac(2, 1));
        for eps in [0.1, 0.9] {
            for delta in [0.01, 0.5] {
                let k = katok_number(&binary(1), &dirac, 2, eps, delta, BallKind::Open, true, &b)
                    .unwrap();
                assert_eq!(k.value, 1);
            }
        }
    }

    #[test]
    fn local_decay_examples() {
        let b = Budget::default();
        let x = Word::centered(0, vec![0, 1, 1, 0]);
        let d = brin_katok_local(&binary(0), &bernoulli(), &x, 0.5, &[1, 2, 3, 4], &b).unwrap();
        for (_, v) in &d.entries {
            assert!((v - 2f64.ln()).abs() < 1e-12);
        }
        let wide = brin_katok_local(&binary(0), &bernoulli(), &x, 5.0, &[1, 2], &b).unwrap();
        assert!(wide.entries.iter().all(|e| e.1 == 0.0));
        let dirac = MeasureRule::Product(LetterDist::dirac(2, 0));
        let z = Word::centered(0, vec![0; 3]);
        let d = brin_katok_local(&binary(0), &dirac, &z, 0.5, &[1, 2, 3], &b).unwrap();
        assert!(d.entries.iter().all(|e| e.1 == 0.0));
        let one = Word::centered(0, vec![1; 3]);
        assert!(matches!(
            brin_katok_local(&binary(0), &dirac, &one, 0.5, &[1], &b),
            Err(Error::ZeroBallMass { n: 1 })
        ));
    }

    #[test]
    fn product_bounds_bracket_exact_mass() {
        let b = Budget::default();
        for w in 0..=1 {
            let sys = SymbolicSystem::full_shift(make_grid_alphabet(4).unwrap(), w);
            let nu = LetterDist(vec![0.125, 0.375, 0.25, 0.25]);
            let rule = MeasureRule::Product(nu.clone());
            let len = sys.word_len(3);
            let x = Word::centered(w, (0..len).map(|i| (i % 4) as u16).collect());
            for n in 1..=3 {
                for eps in [0.05, 0.2, 0.4, 0.8, 1.5] {
                    let exact =
                        word_ball_mass(&sys, &rule, &x, n, eps, BallKind::Open, &b).unwrap();
                    let (lo, hi) = product_ball_bounds(&sys, &nu, &x, n, eps).unwrap();
                    assert!(lo <= exact + 1e-15 && exact <= hi + 1e-15, "{lo} {exact} {hi}");
                }
            }
            assert_eq!(product_ball_bounds(&sys, &nu, &x, 0, 0.3).unwrap(), (1.0, 1.0));
            let d = LetterDist::dirac(4, 2);
            let c = Word::centered(w, vec![2; sys.word_len(2)]);
            assert_eq!(product_ball_bounds(&sys, &d, &c, 2, 0.1).unwrap(), (1.0, 1.0));
        }
    }

    #[test]
    fn shapira_example() {
        let b = Budget::default();
        let sys = binary(0);
        let window = exhaustive_lift(&sys, 1, &b).unwrap();
        // one ball per letter
        let cover = CoverSpec::certify(&window, vec![vec![0], vec![1]]).unwrap();
        let s = shapira_number(&sys, &window, &cover, &bernoulli(), 2, 0.3, true, &b).unwrap();
        assert_eq!((s.value, s.cells), (3, 4));
        let full = shapira_number(&sys, &window, &cover, &bernoulli(), 2, 1e-9, true, &b).unwrap();
        assert_eq!(full.value, 4);
        let dirac = MeasureRule::Product(LetterDist::dirac(2, 0));
        let d = shapira_number(&sys, &window, &cover, &dirac, 3, 0.2, true, &b).unwrap();
        assert_eq!(d.value, 1);
    }

    #[test]
    fn generated_covers_are_certified() {
        let b = Budget::default();
        let sys = SymbolicSystem::full_shift(make_grid_alphabet(3).unwrap(), 1);
        let window = exhaustive_lift(&sys, 1, &b).unwrap();
        for eps in [0.1, 0.3, 0.6, 1.0, 2.5] {
            let c = generate_cover(&window, eps).unwrap();
            assert!(c.diam < eps && c.leb >= eps / 4.0);
        }
    }

    #[test]
    fn renyi_closed_forms() {
        let bern = RenyiSpec::Product {
            values: vec![0.0, 1.0],
            nu: LetterDist::uniform(2),
        };
        assert!((renyi_partition_entropy(&bern, 2).unwrap() - 2f64.ln()).abs() < 1e-12);
        for m in [2usize, 3, 7, 16] {
            let grid = make_grid_alphabet(m).unwrap();
            let spec = RenyiSpec::Product {
                values: grid.values().to_vec(),
                nu: LetterDist::uniform(m),
            };
            assert!((renyi_partition_entropy(&spec, m).unwrap() - (m as f64).ln()).abs() < 1e-12);
        }
        let dirac = RenyiSpec::Product {
            values: vec![0.0, 0.5, 1.0],
            nu: LetterDist::dirac(3, 1),
        };
        assert_eq!(renyi_partition_entropy(&dirac, 5).unwrap(), 0.0);
    }

    #[test]
    fn plugin_matches_closed_form_for_products() {
        let b = Budget::default();
        let sys = SymbolicSystem::full_shift(make_grid_alphabet(3).unwrap(), 0);
        let nu = LetterDist(vec![0.5, 0.25, 0.25]);
        let spec = RenyiSpec::Product {
            values: sys.alphabet().values().to_vec(),
            nu: nu.clone(),
        };
        for n in 1..=3 {
            let space = exhaustive_lift(&sys, n, &b).unwrap();
            let mu = MeasureRule::Product(nu.clone()).on_space(&space).unwrap();
            for m in [1, 2, 3, 4] {
                let plug = renyi_plugin(&mu, &space, sys.alphabet(), m, n).unwrap();
                let closed = renyi_partition_entropy(&spec, m).unwrap();
                assert!((plug - closed).abs() < 1e-12);
            }
        }
    }

    fn small_block() -> SymbolicSystem {
        make_block_system(3, ParamRule::PaperDefault, ParamRule::PaperDefault, 0).unwrap()
    }

    #[test]
    fn block_closed_forms_match_enumeration() {
        let b = Budget::default();
        let sys = small_block();
        let eps = sys.alphabet().min_gap() * 0.5;
        assert!(cylinder_regime(&sys, eps));
        let dec = ComponentDecomposition::uniform_blocks(&sys, 0.25, &[(1, 0.25), (2, 0.25), (3, 0.25)])
            .unwrap();
        let rule = dec.rule(&sys).unwrap();
        for n in 1..=2 {
            let space = exhaustive_lift(&sys, n, &b).unwrap();
            let mu = rule.on_space(&space).unwrap();
            let enumerated = brin_katok_average(&mu, &space, n, eps).unwrap();
            let closed = block_brin_katok_average(&sys, &dec, n, eps).unwrap();
            assert!((enumerated - closed).abs() < 1e-12, "{enumerated} vs {closed}");
            for delta in [0.1, 0.3, 0.6] {
                let k = katok_on_space(&mu, &space, n, eps, delta, BallKind::Open, true, &b)
                    .unwrap();
                let c = block_katok_count(&sys, &dec, n, eps, delta).unwrap();
                assert_eq!(k.value as f64, c);
            }
        }
        assert!(block_brin_katok_average(&sys, &dec, 1, 0.3).is_err());
    }
}
