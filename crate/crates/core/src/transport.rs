//! Wasserstein and Lévy-Prokhorov distances between measures on one finite space.
//!
//! Both distances go through the integer transportation solver. Masses are
//! quantized to multiples of `2^-40`, so dyadic inputs are handled exactly.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measures::FiniteMeasure;
use crate::metric::FiniteMetricSpace;
use crate::solvers::flow::{self, SCALE};

/// Largest support the subset-enumeration oracle accepts.
pub const SUBSET_ORACLE_MAX_SUPPORT: usize = 12;

/// A transport plan between two measures, as sparse `(from, to, mass)` cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub cells: Vec<(usize, usize, f64)>,
}

impl Coupling {
    /// Largest deviation of the marginals from `mu` and `nu`.
    pub fn marginal_error(&self, mu: &FiniteMeasure, nu: &FiniteMeasure) -> f64 {
        let mut rows = vec![0.0; mu.weights().len()];
        let mut cols = vec![0.0; nu.weights().len()];
        for &(i, j, m) in &self.cells {
            rows[i] += m;
            cols[j] += m;
        }
        let r = rows.iter().zip(mu.weights()).map(|(a, b)| (a - b).abs());
        let c = cols.iter().zip(nu.weights()).map(|(a, b)| (a - b).abs());
        r.chain(c).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transport {
    pub value: f64,
    pub coupling: Coupling,
}

/// Solve the transportation problem on the supports with `cost(d)`.
///
/// The pair is put in a canonical order first, so swapping the arguments runs
/// the identical computation and the value is symmetric bit for bit.
fn solve<F: Fn(f64) -> f64>(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    cost: F,
) -> Result<(f64, Coupling)> {
    mu.check_space(space)?;
    nu.check_space(space)?;
    let swapped = mu
        .weights()
        .iter()
        .zip(nu.weights())
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .is_some_and(|o| o.is_gt());
    if swapped {
        let (value, c) = solve_ordered(nu, mu, space, cost);
        let cells = c.cells.into_iter().map(|(i, j, m)| (j, i, m)).collect();
        return Ok((value, Coupling { cells }));
    }
    Ok(solve_ordered(mu, nu, space, cost))
}

fn solve_ordered<F: Fn(f64) -> f64>(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    cost: F,
) -> (f64, Coupling) {
    let sa = mu.support();
    let sb = nu.support();
    let supply = flow::quantize(&sa.iter().map(|&i| mu.weight(i)).collect::<Vec<_>>());
    let demand = flow::quantize(&sb.iter().map(|&j| nu.weight(j)).collect::<Vec<_>>());
    let costs: Vec<f64> = sa
        .iter()
        .flat_map(|&i| sb.iter().map(move |&j| (i, j)))
        .map(|(i, j)| cost(space.dist(i, j)))
        .collect();
    let plan = flow::transport(&supply, &demand, &costs);
    let cells = plan
        .flows
        .iter()
        .map(|&(a, b, f)| (sa[a], sb[b], f as f64 / SCALE as f64))
        .collect();
    (plan.cost / SCALE as f64, Coupling { cells })
}

/// `W_p(mu, nu)` with its optimal coupling.
pub fn wasserstein(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    p: f64,
) -> Result<Transport> {
    if !(p >= 1.0) || !p.is_finite() {
        return invalid(format!("p must lie in [1, inf), got {p}"));
    }
    let (cost, coupling) = if p == 1.0 {
        solve(mu, nu, space, |d| d)?
    } else {
        solve(mu, nu, space, |d| d.powf(p))?
    };
    let value = if p == 1.0 { cost } else { cost.powf(1.0 / p) };
    Ok(Transport { value, coupling })
}

/// Smallest mass any coupling puts on pairs farther apart than `eps`.
pub fn min_coupling_excess(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    eps: f64,
) -> Result<f64> {
    Ok(solve(mu, nu, space, |d| if d > eps { 1.0 } else { 0.0 })?.0)
}

/// Distinct distances between the supports, with 0 prepended.
fn breakpoints(mu: &FiniteMeasure, nu: &FiniteMeasure, space: &FiniteMetricSpace) -> Vec<f64> {
    let sb = nu.support();
    let mut d: Vec<f64> = mu
        .support()
        .iter()
        .flat_map(|&i| sb.iter().map(move |&j| space.dist(i, j)))
        .collect();
    d.push(0.0);
    d.sort_by(f64::total_cmp);
    d.dedup();
    d
}

/// `LP(mu, nu) = inf { eps > 0 : min_coupling_excess(eps) <= eps }`.
///
/// The excess `g` is a right-continuous step function, constant on
/// `[d_i, d_{i+1})` between consecutive support distances. The condition holds
/// somewhere on that interval iff `g(d_i) < d_{i+1}`, and then the infimum over
/// it is `max(d_i, g(d_i))`. That predicate is monotone in `i`, so the first
/// such interval is found by bisection and the exact infimum is returned.
pub fn levy_prokhorov(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    space: &FiniteMetricSpace,
) -> Result<f64> {
    mu.check_space(space)?;
    nu.check_space(space)?;
    let d = breakpoints(mu, nu, space);
    let next = |i: usize| d.get(i + 1).copied().unwrap_or(f64::INFINITY);
    // the last interval always qualifies: every pair is within d_max
    let (mut lo, mut hi) = (0, d.len() - 1);
    let mut g_hi = 0.0;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let g = min_coupling_excess(mu, nu, space, d[mid])?;
        if g < next(mid) {
            hi = mid;
            g_hi = g;
        } else {
            lo = mid + 1;
        }
    }
    if hi == d.len() - 1 {
        g_hi = min_coupling_excess(mu, nu, space, d[hi])?;
    }
    Ok(d[hi].max(g_hi))
}

/// Lévy-Prokhorov distance straight from the definition: for each `eps` the worst
/// two-sided deficiency `max_E mu(E) - nu(V_eps(E))` (and the mirror) over subsets
/// `E` of the supports, with open neighbourhoods `V_eps(E) = { y : d(y, E) < eps }`.
///
/// The deficiency is a left-continuous step function, constant on `(d_i, d_{i+1}]`,
/// so the infimum is `max(d_i, h_i)` at the first interval with `h_i <= d_{i+1}`.
pub fn levy_prokhorov_subsets(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    space: &FiniteMetricSpace,
) -> Result<f64> {
    mu.check_space(space)?;
    nu.check_space(space)?;
    let (sa, sb) = (mu.support(), nu.support());
    if sa.len().max(sb.len()) > SUBSET_ORACLE_MAX_SUPPORT {
        return invalid(format!(
            "subset oracle supports at most {SUBSET_ORACLE_MAX_SUPPORT} atoms"
        ));
    }
    let d = breakpoints(mu, nu, space);
    for i in 0..d.len() {
        let Some(&upper) = d.get(i + 1) else {
            // beyond the largest distance every neighbourhood is everything
            return Ok(d[i]);
        };
        let h = deficiency(mu, nu, &sa, &sb, space, upper)
            .max(deficiency(nu, mu, &sb, &sa, space, upper));
        if h <= upper {
            return Ok(d[i].max(h));
        }
    }
    unreachable!("breakpoints are never empty")
}

/// `max_E a(E) - b(V_eps(E))` over subsets `E` of `sa`, masses summed by index.
fn deficiency(
    a: &FiniteMeasure,
    b: &FiniteMeasure,
    sa: &[usize],
    sb: &[usize],
    space: &FiniteMetricSpace,
    eps: f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for mask in 1u32..(1 << sa.len()) {
        let members: Vec<usize> = (0..sa.len()).filter(|k| mask >> k & 1 == 1).map(|k| sa[k]).collect();
        let mass_e: f64 = members.iter().map(|&i| a.weight(i)).sum();
        let mass_v: f64 = sb
            .iter()
            .filter(|&&j| members.iter().any(|&i| space.dist(i, j) < eps))
            .map(|&j| b.weight(j))
            .sum();
        worst = worst.max(mass_e - mass_v);
    }
    worst
}
