//! Separated-set and covering counts on finite metric spaces.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::{Budget, NodeMeter};
use crate::error::{invalid, Error, Result};
use crate::metric::{FiniteMetricSpace, MetricAlphabet};
use crate::solvers::{clique, cover};

/// Largest space the subset-enumeration oracle accepts.
pub const BRUTE_FORCE_MAX_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountKind {
    /// Largest set with pairwise distance `> eps`.
    Separated,
    /// Smallest set within distance `< eps` of every point.
    Spanning,
    /// Fewest open `eps`-balls centered at points.
    OpenBallCover,
    /// Fewest closed `eps`-balls centered at points.
    ClosedBallCover,
}

impl CountKind {
    pub fn symbol(self) -> &'static str {
        match self {
            CountKind::Separated => "S",
            CountKind::Spanning => "R",
            CountKind::OpenBallCover => "N",
            CountKind::ClosedBallCover => "C",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountMethod {
    BruteForce,
    BranchBound,
    Greedy,
}

impl CountMethod {
    pub fn name(self) -> &'static str {
        match self {
            CountMethod::BruteForce => "brute_force",
            CountMethod::BranchBound => "branch_bound",
            CountMethod::Greedy => "greedy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub value: usize,
    /// Separated set for `Separated`, ball centers otherwise.
    pub witness: Vec<usize>,
    pub exact: bool,
    pub method: CountMethod,
}

/// Membership of every ball of radius `eps` around each point.
pub(crate) fn balls(space: &FiniteMetricSpace, eps: f64, closed: bool) -> Vec<FixedBitSet> {
    let p = space.len();
    (0..p)
        .map(|c| {
            let mut b = FixedBitSet::with_capacity(p);
            for (j, &d) in space.row(c).iter().enumerate() {
                if d < eps || (closed && d <= eps) {
                    b.insert(j);
                }
            }
            b
        })
        .collect()
}

/// Adjacency of the "farther than eps" graph.
fn far_graph(space: &FiniteMetricSpace, eps: f64) -> Vec<FixedBitSet> {
    let p = space.len();
    (0..p)
        .map(|i| {
            let mut b = FixedBitSet::with_capacity(p);
            for (j, &d) in space.row(i).iter().enumerate() {
                if d > eps {
                    b.insert(j);
                }
            }
            b
        })
        .collect()
}

/// One of the four counts at scale `eps`.
pub fn count(
    space: &FiniteMetricSpace,
    eps: f64,
    kind: CountKind,
    method: CountMethod,
    budget: &Budget,
) -> Result<CountResult> {
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    let witness = match (kind, method) {
        (CountKind::Separated, CountMethod::Greedy) => greedy_net(space, eps, 0),
        (CountKind::Separated, CountMethod::BranchBound) => {
            let mut meter = NodeMeter::new(budget.max_nodes);
            clique::max_clique(&far_graph(space, eps), &mut meter)?
        }
        (CountKind::Separated, CountMethod::BruteForce) => brute_separated(space, eps, budget)?,
        (_, m) => {
            let closed = kind == CountKind::ClosedBallCover;
            let sets = balls(space, eps, closed);
            match m {
                CountMethod::Greedy => {
                    cover::greedy_cover(&sets, space.len()).expect("balls contain their centers")
                }
                CountMethod::BranchBound => {
                    let mut meter = NodeMeter::new(budget.max_nodes);
                    cover::min_set_cover(&sets, space.len(), &mut meter)?
                        .expect("balls contain their centers")
                }
                CountMethod::BruteForce => brute_cover(&sets, budget)?,
            }
        }
    };
    Ok(CountResult {
        value: witness.len(),
        witness,
        exact: method != CountMethod::Greedy,
        method,
    })
}

fn brute_guard(p: usize, budget: &Budget) -> Result<()> {
    if p > BRUTE_FORCE_MAX_POINTS || (1u64 << p) > budget.max_nodes {
        return Err(Error::BudgetExceeded {
            what: "subset enumeration",
            limit: budget.max_nodes.min(1 << BRUTE_FORCE_MAX_POINTS),
        });
    }
    Ok(())
}

fn mask_members(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

fn brute_separated(space: &FiniteMetricSpace, eps: f64, budget: &Budget) -> Result<Vec<usize>> {
    let p = space.len();
    brute_guard(p, budget)?;
    let far: Vec<u32> = (0..p)
        .map(|i| {
            (0..p)
                .filter(|&j| space.dist(i, j) > eps)
                .fold(0u32, |m, j| m | 1 << j)
        })
        .collect();
    let mut best = 1u32;
    for mask in 1u32..(1 << p) {
        if mask.count_ones() <= best.count_ones() {
            continue;
        }
        let ok = mask_members(mask).iter().all(|&i| (mask & !(1 << i)) & !far[i] == 0);
        if ok {
            best = mask;
        }
    }
    Ok(mask_members(best))
}

fn brute_cover(sets: &[FixedBitSet], budget: &Budget) -> Result<Vec<usize>> {
    let p = sets.len();
    brute_guard(p, budget)?;
    let masks: Vec<u32> = sets.iter().map(|s| s.ones().fold(0u32, |m, j| m | 1 << j)).collect();
    let full = if p == 32 { u32::MAX } else { (1u32 << p) - 1 };
    let mut best = full;
    for mask in 1u32..(1 << p) {
        if mask.count_ones() >= best.count_ones() {
            continue;
        }
        let union = mask_members(mask).iter().fold(0u32, |u, &i| u | masks[i]);
        if union == full {
            best = mask;
        }
    }
    Ok(mask_members(best))
}

/// Greedy net: scan points (index order for seed 0, a seeded shuffle otherwise) and
/// keep each one farther than `eps` from everything kept. The result is sorted; it
/// is `eps`-separated and every point lies within `<= eps` of it.
pub fn greedy_net(space: &FiniteMetricSpace, eps: f64, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..space.len()).collect();
    if seed != 0 {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut net: Vec<usize> = Vec::new();
    for i in order {
        if net.iter().all(|&c| space.dist(i, c) > eps) {
            net.push(i);
        }
    }
    net.sort_unstable();
    net
}

/// Where ball centers may sit when covering points of a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Centers {
    /// Anywhere on the real line.
    Ambient,
    /// Only at the points themselves.
    Points,
}

/// Fewest open `eps`-balls covering sorted reals, by the left-to-right sweep
/// (optimal for intervals on a line). Returns the centers used.
pub fn interval_cover(values: &[f64], eps: f64, centers: Centers) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let left = values[i];
        let center = match centers {
            Centers::Ambient => left + eps * 0.5,
            Centers::Points => {
                let mut c = i;
                while c + 1 < values.len() && values[c + 1] - left < eps {
                    c += 1;
                }
                values[c]
            }
        };
        out.push(center);
        match centers {
            // an open interval of length 2 eps starting just left of `left`
            Centers::Ambient => {
                while i < values.len() && values[i] - left < 2.0 * eps {
                    i += 1
                }
            }
            Centers::Points => {
                while i < values.len() && (values[i] - center).abs() < eps {
                    i += 1
                }
            }
        }
    }
    out
}

/// What a box-count ladder is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum BoxTarget<'a> {
    /// A subset of the line; counted exactly by the ambient interval sweep.
    Alphabet(&'a MetricAlphabet),
    /// A finite space; counted with `N` and the given method.
    Space(&'a FiniteMetricSpace, CountMethod),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub eps: f64,
    pub value: usize,
    pub exact: bool,
}

/// Covering numbers along a strictly decreasing ladder.
pub fn box_dimension_counts(
    target: BoxTarget,
    ladder: &[f64],
    budget: &Budget,
) -> Result<Vec<BoxCount>> {
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("eps ladder must be strictly decreasing");
    }
    ladder
        .iter()
        .map(|&eps| {
            if !(eps > 0.0) {
                return invalid(format!("eps must be positive, got {eps}"));
            }
            Ok(match target {
                BoxTarget::Alphabet(a) => BoxCount {
                    eps,
                    value: interval_cover(a.values(), eps, Centers::Ambient).len(),
                    exact: true,
                },
                BoxTarget::Space(space, method) => {
                    let r = count(space, eps, CountKind::OpenBallCover, method, budget)?;
                    BoxCount {
                        eps,
                        value: r.value,
                        exact: r.exact,
                    }
                }
            })
        })
        .collect()
}
