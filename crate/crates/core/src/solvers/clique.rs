//! Maximum clique by branch and bound with a greedy-colouring bound.

use fixedbitset::FixedBitSet;

use crate::budget::NodeMeter;
use crate::error::Result;

/// Largest clique of the graph given by adjacency rows. Returned sorted.
pub(crate) fn max_clique(adj: &[FixedBitSet], meter: &mut NodeMeter) -> Result<Vec<usize>> {
    let n = adj.len();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let mut best = Vec::new();
    let mut current = Vec::new();
    expand(adj, &mut current, all, &mut best, meter)?;
    best.sort_unstable();
    Ok(best)
}

fn expand(
    adj: &[FixedBitSet],
    current: &mut Vec<usize>,
    mut cand: FixedBitSet,
    best: &mut Vec<usize>,
    meter: &mut NodeMeter,
) -> Result<()> {
    meter.tick()?;
    let (order, colors) = colour_sort(adj, &cand);
    for idx in (0..order.len()).rev() {
        if current.len() + colors[idx] <= best.len() {
            return Ok(());
        }
        let v = order[idx];
        current.push(v);
        let mut next = cand.clone();
        next.intersect_with(&adj[v]);
        if next.is_clear() {
            if current.len() > best.len() {
                *best = current.clone();
            }
        } else {
            expand(adj, current, next, best, meter)?;
        }
        current.pop();
        cand.set(v, false);
    }
    Ok(())
}

/// Greedy sequential colouring in index order; vertices come out sorted by colour.
fn colour_sort(adj: &[FixedBitSet], cand: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
    let mut uncoloured = cand.clone();
    let mut order = Vec::with_capacity(cand.count_ones(..));
    let mut colors = Vec::with_capacity(order.capacity());
    let mut colour = 0;
    while !uncoloured.is_clear() {
        colour += 1;
        let mut q = uncoloured.clone();
        while let Some(v) = q.minimum() {
            uncoloured.set(v, false);
            q.set(v, false);
            q.difference_with(&adj[v]);
            order.push(v);
            colors.push(colour);
        }
    }
    (order, colors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Vec<FixedBitSet> {
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }

    #[test]
    fn small_graphs() {
        let mut m = NodeMeter::new(1_000);
        assert_eq!(max_clique(&graph(1, &[]), &mut m).unwrap().len(), 1);
        let tri = graph(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(max_clique(&tri, &mut m).unwrap(), vec![0, 1, 2]);
        let empty = graph(5, &[]);
        assert_eq!(max_clique(&empty, &mut m).unwrap().len(), 1);
    }

    #[test]
    fn complete_graph() {
        let n = 12;
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let mut m = NodeMeter::new(10_000);
        assert_eq!(max_clique(&graph(n, &edges), &mut m).unwrap().len(), n);
    }
}
