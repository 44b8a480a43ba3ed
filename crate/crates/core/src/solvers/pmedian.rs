//! Discrete p-median: fewest centers with weighted distortion under a target.
//!
//! `cost[c][x]` is the distortion of client `x` served by center `c`.
//! The objective of a center set is always summed in client order, so the
//! decision procedure and the reported objective agree bit for bit.

use crate::budget::NodeMeter;
use crate::error::Result;

/// Relative slack before a bound prunes, so rounding never cuts a feasible branch.
const BOUND_SLACK: f64 = 1e-9;

pub(crate) struct Instance<'a> {
    /// Client weights.
    pub weights: &'a [f64],
    /// Row-major `centers x clients`.
    pub cost: &'a [f64],
    pub centers: usize,
}

impl Instance<'_> {
    fn clients(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    fn c(&self, center: usize, client: usize) -> f64 {
        self.cost[center * self.clients() + client]
    }

    /// Canonical objective of a center set.
    pub fn objective(&self, centers: &[usize]) -> f64 {
        (0..self.clients())
            .map(|x| {
                let d = centers.iter().map(|&c| self.c(c, x)).fold(f64::INFINITY, f64::min);
                self.weights[x] * d
            })
            .sum()
    }
}

/// Greedy: add the center that lowers the objective most until it meets `target`.
pub(crate) fn greedy(inst: &Instance, target: f64) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = vec![f64::INFINITY; inst.clients()];
    loop {
        let mut best: Option<(usize, f64)> = None;
        for c in 0..inst.centers {
            if chosen.contains(&c) {
                continue;
            }
            let obj: f64 = (0..inst.clients())
                .map(|x| inst.weights[x] * current[x].min(inst.c(c, x)))
                .sum();
            if best.is_none_or(|(_, b)| obj < b) {
                best = Some((c, obj));
            }
        }
        let Some((c, _)) = best else { break };
        chosen.push(c);
        for (x, cur) in current.iter_mut().enumerate() {
            *cur = cur.min(inst.c(c, x));
        }
        chosen.sort_unstable();
        if inst.objective(&chosen) <= target {
            break;
        }
    }
    chosen
}

/// Some set of exactly `k` centers with objective `<= target`, if one exists.
pub(crate) fn decide(
    inst: &Instance,
    k: usize,
    target: f64,
    meter: &mut NodeMeter,
) -> Result<Option<Vec<usize>>> {
    let n = inst.clients();
    let p = inst.centers;
    if k == 0 || k > p {
        return Ok(None);
    }
    // suffix[c * n + x] = min over centers c' >= c of cost(c', x)
    let mut suffix = vec![f64::INFINITY; (p + 1) * n];
    for c in (0..p).rev() {
        for x in 0..n {
            suffix[c * n + x] = suffix[(c + 1) * n + x].min(inst.c(c, x));
        }
    }
    let mut search = Search {
        inst,
        suffix: &suffix,
        k,
        target,
        chosen: Vec::with_capacity(k),
        meter,
    };
    let current = vec![f64::INFINITY; n];
    search.run(0, &current)
}

struct Search<'a, 'm> {
    inst: &'a Instance<'a>,
    suffix: &'a [f64],
    k: usize,
    target: f64,
    chosen: Vec<usize>,
    meter: &'m mut NodeMeter,
}

impl Search<'_, '_> {
    fn run(&mut self, start: usize, current: &[f64]) -> Result<Option<Vec<usize>>> {
        self.meter.tick()?;
        let n = self.inst.clients();
        if self.chosen.len() == self.k {
            let obj: f64 = (0..n).map(|x| self.inst.weights[x] * current[x]).sum();
            return Ok((obj <= self.target).then(|| self.chosen.clone()));
        }
        let left = self.k - self.chosen.len();
        if start + left > self.inst.centers {
            return Ok(None);
        }
        let last = self.inst.centers - left;
        let obj: f64 = (0..n).map(|x| self.inst.weights[x] * current[x]).sum();
        // topk[c] = sum of the `left` largest single-center gains among centers >= c
        let mut topk = vec![0.0; last + 1];
        let mut best: Vec<f64> = Vec::with_capacity(left + 1);
        for c in (start..self.inst.centers).rev().filter(|_| obj.is_finite()) {
            let gain: f64 = (0..n)
                .map(|x| self.inst.weights[x] * (current[x] - self.inst.c(c, x)).max(0.0))
                .sum();
            let at = best.partition_point(|&g| g >= gain);
            if at < left {
                best.insert(at, gain);
                best.truncate(left);
            }
            if c <= last {
                topk[c] = best.iter().sum();
            }
        }
        for (c, &top) in topk.iter().enumerate().take(last + 1).skip(start) {
            // every completion uses `left` centers >= c only
            let reach: f64 = (0..n)
                .map(|x| self.inst.weights[x] * current[x].min(self.suffix[c * n + x]))
                .sum();
            // before the first center the gains are unbounded and say nothing
            let bound = if obj.is_finite() { reach.max(obj - top) } else { reach };
            if bound - BOUND_SLACK * (1.0 + bound.abs()) > self.target {
                // both bounds only grow with c
                return Ok(None);
            }
            let next: Vec<f64> = (0..n).map(|x| current[x].min(self.inst.c(c, x))).collect();
            self.chosen.push(c);
            let found = self.run(c + 1, &next)?;
            self.chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

/// Fewest centers meeting `target`: binary search on `k` between 1 and the greedy size.
/// Feasibility is monotone in `k` because adding a center never raises any term.
pub(crate) fn solve(inst: &Instance, target: f64, meter: &mut NodeMeter) -> Result<Vec<usize>> {
    let upper = greedy(inst, target);
    let mut best = upper;
    let (mut lo, mut hi) = (1, best.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        match decide(inst, mid, target, meter)? {
            Some(found) => {
                hi = mid;
                best = found;
            }
            None => lo = mid + 1,
        }
    }
    Ok(best)
}
