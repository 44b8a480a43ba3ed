//! Exact and greedy set cover, full and weighted-partial.
//!
//! Sets are bitsets over a universe of point indices. Both exact solvers
//! first drop dominated sets (a set contained in another, or a duplicate of
//! a lower-indexed set); dropping them never changes the optimum.

use fixedbitset::FixedBitSet;

use crate::budget::NodeMeter;
use crate::error::Result;

/// Slack used only when pruning on float mass bounds; acceptance is always
/// decided on the canonical (ascending-index) sum.
const BOUND_SLACK: f64 = 1e-9;

/// Coverage requirement on the covered mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassThreshold {
    pub level: f64,
    /// `mass > level` when set, `mass >= level` otherwise.
    pub strict: bool,
}

impl MassThreshold {
    pub fn above(level: f64) -> Self {
        MassThreshold { level, strict: true }
    }

    pub fn at_least(level: f64) -> Self {
        MassThreshold {
            level,
            strict: false,
        }
    }

    #[inline]
    pub fn met(&self, mass: f64) -> bool {
        if self.strict {
            mass > self.level
        } else {
            mass >= self.level
        }
    }
}

/// Mass of a point set, summed in ascending index order.
pub(crate) fn canonical_mass(set: &FixedBitSet, weights: &[f64]) -> f64 {
    set.ones().map(|i| weights[i]).sum()
}

/// Indices of sets that are not dominated, in ascending order.
pub(crate) fn undominated(sets: &[FixedBitSet]) -> Vec<usize> {
    let sizes: Vec<usize> = sets.iter().map(|s| s.count_ones(..)).collect();
    (0..sets.len())
        .filter(|&i| {
            !(0..sets.len()).any(|j| {
                j != i
                    && sizes[j] >= sizes[i]
                    && (sizes[j] > sizes[i] || j < i)
                    && sets[i].is_subset(&sets[j])
            })
        })
        .collect()
}

/// Greedy cover: repeatedly the set covering most uncovered elements, lowest index on ties.
pub(crate) fn greedy_cover(sets: &[FixedBitSet], universe: usize) -> Option<Vec<usize>> {
    let mut uncovered = FixedBitSet::with_capacity(universe);
    uncovered.insert_range(..);
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.intersection_count(&uncovered)))
            .fold((usize::MAX, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if gain == 0 {
            return None;
        }
        uncovered.difference_with(&sets[best]);
        chosen.push(best);
    }
    chosen.sort_unstable();
    Some(chosen)
}

/// Minimum number of sets whose union is the whole universe.
/// Returns `None` when the sets do not cover the universe at all.
pub(crate) fn min_set_cover(
    sets: &[FixedBitSet],
    universe: usize,
    meter: &mut NodeMeter,
) -> Result<Option<Vec<usize>>> {
    let Some(greedy) = greedy_cover(sets, universe) else {
        return Ok(None);
    };
    let keep = undominated(sets);
    let reduced: Vec<FixedBitSet> = keep.iter().map(|&i| sets[i].clone()).collect();
    // containing[e] = reduced sets that contain element e
    let mut containing = vec![FixedBitSet::with_capacity(reduced.len()); universe];
    for (si, s) in reduced.iter().enumerate() {
        for e in s.ones() {
            containing[e].insert(si);
        }
    }
    let mut search = CoverSearch {
        sets: &reduced,
        containing: &containing,
        best: greedy.to_vec(),
        best_is_original: true,
        chosen: Vec::new(),
        meter,
    };
    let mut uncovered = FixedBitSet::with_capacity(universe);
    uncovered.insert_range(..);
    search.run(&uncovered)?;
    let mut out: Vec<usize> = if search.best_is_original {
        search.best
    } else {
        search.best.iter().map(|&i| keep[i]).collect()
    };
    out.sort_unstable();
    Ok(Some(out))
}

struct CoverSearch<'a, 'm> {
    sets: &'a [FixedBitSet],
    containing: &'a [FixedBitSet],
    best: Vec<usize>,
    best_is_original: bool,
    chosen: Vec<usize>,
    meter: &'m mut NodeMeter,
}

impl CoverSearch<'_, '_> {
    fn run(&mut self, uncovered: &FixedBitSet) -> Result<()> {
        self.meter.tick()?;
        if uncovered.is_clear() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
                self.best_is_original = false;
            }
            return Ok(());
        }
        if self.chosen.len() + self.lower_bound(uncovered) >= self.best.len() {
            return Ok(());
        }
        // branch on the element with the fewest covering sets
        let pivot = uncovered
            .ones()
            .min_by_key(|&e| (self.containing[e].count_ones(..), e))
            .expect("nonempty");
        let mut options: Vec<(usize, usize)> = self.containing[pivot]
            .ones()
            .map(|s| (s, self.sets[s].intersection_count(uncovered)))
            .collect();
        options.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (s, _) in options {
            let mut next = uncovered.clone();
            next.difference_with(&self.sets[s]);
            self.chosen.push(s);
            self.run(&next)?;
            self.chosen.pop();
            if self.chosen.len() + 1 >= self.best.len() {
                break;
            }
        }
        Ok(())
    }

    /// max of the size bound and a disjoint-family packing bound
    fn lower_bound(&self, uncovered: &FixedBitSet) -> usize {
        let biggest = self
            .sets
            .iter()
            .map(|s| s.intersection_count(uncovered))
            .max()
            .unwrap_or(0);
        if biggest == 0 {
            return usize::MAX / 2;
        }
        let remaining = uncovered.count_ones(..);
        let size_bound = remaining.div_ceil(biggest);

        let mut elems: Vec<usize> = uncovered.ones().collect();
        elems.sort_by_key(|&e| (self.containing[e].count_ones(..), e));
        let mut used = FixedBitSet::with_capacity(self.sets.len());
        let mut packing = 0;
        for e in elems {
            if self.containing[e].is_disjoint(&used) {
                used.union_with(&self.containing[e]);
                packing += 1;
            }
        }
        size_bound.max(packing)
    }
}

/// Greedy partial cover by marginal mass, lowest index on ties.
/// `None` if the threshold is unreachable.
pub(crate) fn greedy_partial_cover(
    sets: &[FixedBitSet],
    weights: &[f64],
    threshold: MassThreshold,
) -> Option<Vec<usize>> {
    let universe = weights.len();
    let mut covered = FixedBitSet::with_capacity(universe);
    let mut chosen = Vec::new();
    while !threshold.met(canonical_mass(&covered, weights)) {
        let mut best = None;
        let mut best_gain = 0.0;
        for (i, s) in sets.iter().enumerate() {
            let gain: f64 = s.difference(&covered).map(|e| weights[e]).sum();
            if gain > best_gain {
                best_gain = gain;
                best = Some(i);
            }
        }
        let i = best?;
        covered.union_with(&sets[i]);
        chosen.push(i);
    }
    chosen.sort_unstable();
    Some(chosen)
}

/// Minimum number of sets whose union meets the mass threshold.
/// `None` if even the union of all sets falls short.
pub(crate) fn min_partial_cover(
    sets: &[FixedBitSet],
    weights: &[f64],
    threshold: MassThreshold,
    meter: &mut NodeMeter,
) -> Result<Option<Vec<usize>>> {
    let universe = weights.len();
    if threshold.met(0.0) {
        return Ok(Some(Vec::new()));
    }
    let mut everything = FixedBitSet::with_capacity(universe);
    for s in sets {
        everything.union_with(s);
    }
    if !threshold.met(canonical_mass(&everything, weights)) {
        return Ok(None);
    }
    let greedy = greedy_partial_cover(sets, weights, threshold)
        .expect("union of all sets meets the threshold");

    let keep = undominated(sets);
    let masses: Vec<f64> = keep.iter().map(|&i| canonical_mass(&sets[i], weights)).collect();
    // heaviest first, index order on ties
    let mut order: Vec<usize> = (0..keep.len()).collect();
    order.sort_by(|&a, &b| masses[b].total_cmp(&masses[a]).then(a.cmp(&b)));
    let reduced: Vec<FixedBitSet> = order.iter().map(|&i| sets[keep[i]].clone()).collect();

    let mut lower = 0;
    let mut acc = 0.0;
    for &i in &order {
        lower += 1;
        acc += masses[i];
        if threshold.met(acc + BOUND_SLACK) {
            break;
        }
    }
    for k in lower.max(1)..greedy.len() {
        let mut dfs = PartialSearch {
            sets: &reduced,
            weights,
            threshold,
            k,
            chosen: Vec::with_capacity(k),
            meter,
        };
        if let Some(found) = dfs.run(0, &FixedBitSet::with_capacity(universe))? {
            let mut out: Vec<usize> = found.iter().map(|&r| keep[order[r]]).collect();
            out.sort_unstable();
            return Ok(Some(out));
        }
    }
    Ok(Some(greedy))
}

struct PartialSearch<'a, 'm> {
    sets: &'a [FixedBitSet],
    weights: &'a [f64],
    threshold: MassThreshold,
    k: usize,
    chosen: Vec<usize>,
    meter: &'m mut NodeMeter,
}

impl PartialSearch<'_, '_> {
    fn run(&mut self, start: usize, covered: &FixedBitSet) -> Result<Option<Vec<usize>>> {
        self.meter.tick()?;
        let mass = canonical_mass(covered, self.weights);
        if self.threshold.met(mass) {
            return Ok(Some(self.chosen.clone()));
        }
        let left = self.k - self.chosen.len();
        if left == 0 || start >= self.sets.len() {
            return Ok(None);
        }
        let mut gains: Vec<(usize, f64)> = (start..self.sets.len())
            .map(|i| {
                let g: f64 = self.sets[i].difference(covered).map(|e| self.weights[e]).sum();
                (i, g)
            })
            .filter(|&(_, g)| g > 0.0)
            .collect();
        let mut top: Vec<f64> = gains.iter().map(|g| g.1).collect();
        top.sort_by(|a, b| b.total_cmp(a));
        let bound: f64 = mass + top.iter().take(left).sum::<f64>();
        if !self.threshold.met(bound + BOUND_SLACK) {
            return Ok(None);
        }
        // try high-gain sets first; combinations stay in ascending set order
        gains.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for (i, _) in gains {
            let mut next = covered.clone();
            next.union_with(&self.sets[i]);
            self.chosen.push(i);
            let found = self.run(i + 1, &next)?;
            self.chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(universe: usize, raw: &[&[usize]]) -> Vec<FixedBitSet> {
        raw.iter()
            .map(|r| {
                let mut b = FixedBitSet::with_capacity(universe);
                for &e in *r {
                    b.insert(e);
                }
                b
            })
            .collect()
    }

    /// Smallest cover by exhaustive subset enumeration.
    fn brute_cover(s: &[FixedBitSet], universe: usize) -> usize {
        let mut best = usize::MAX;
        for mask in 0u32..(1 << s.len()) {
            let mut u = FixedBitSet::with_capacity(universe);
            for (i, set) in s.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    u.union_with(set);
                }
            }
            if u.count_ones(..) == universe {
                best = best.min(mask.count_ones() as usize);
            }
        }
        best
    }

    #[test]
    fn greedy_is_not_optimal_but_exact_is() {
        // classic instance where greedy takes 3 but 2 suffice
        let s = sets(6, &[&[0, 1, 2], &[3, 4, 5], &[0, 1, 3, 4], &[2], &[5]]);
        let g = greedy_cover(&s, 6).unwrap();
        let mut m = NodeMeter::new(10_000);
        let e = min_set_cover(&s, 6, &mut m).unwrap().unwrap();
        assert!(g.len() >= e.len());
        assert_eq!(e.len(), brute_cover(&s, 6));
        assert_eq!(e, vec![0, 1]);
    }

    #[test]
    fn uncoverable() {
        let s = sets(3, &[&[0], &[1]]);
        let mut m = NodeMeter::new(100);
        assert_eq!(min_set_cover(&s, 3, &mut m).unwrap(), None);
    }

    #[test]
    fn partial_cover_threshold_semantics() {
        let s = sets(4, &[&[0], &[1], &[2], &[3]]);
        let w = [0.25; 4];
        let mut m = NodeMeter::new(10_000);
        // > 0.5 needs three singletons, >= 0.5 needs two
        assert_eq!(
            min_partial_cover(&s, &w, MassThreshold::above(0.5), &mut m).unwrap().unwrap().len(),
            3
        );
        assert_eq!(
            min_partial_cover(&s, &w, MassThreshold::at_least(0.5), &mut m)
                .unwrap()
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            min_partial_cover(&s, &w, MassThreshold::at_least(0.0), &mut m).unwrap().unwrap().len(),
            0
        );
        assert_eq!(min_partial_cover(&s, &w, MassThreshold::above(1.0), &mut m).unwrap(), None);
    }

    #[test]
    fn undominated_drops_subsets_and_duplicates() {
        let s = sets(4, &[&[0, 1], &[0], &[0, 1], &[2, 3]]);
        assert_eq!(undominated(&s), vec![0, 3]);
    }

    #[test]
    fn budget_is_enforced() {
        let n = 30;
        let raw: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n, (i + 7) % n]).collect();
        let refs: Vec<&[usize]> = raw.iter().map(|v| v.as_slice()).collect();
        let s = sets(n, &refs);
        let mut m = NodeMeter::new(3);
        assert!(min_set_cover(&s, n, &mut m).is_err());
    }
}
