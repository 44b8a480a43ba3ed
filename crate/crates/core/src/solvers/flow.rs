//! Transportation problem by successive shortest paths.
//!
//! Supplies and demands are quantized to integers summing to `2^40`, so the
//! flow is exact integer arithmetic; only the cost comparisons use floats.
//! Inputs whose weights are multiples of `2^-40` are represented exactly.

pub(crate) const SCALE_BITS: u32 = 40;
pub(crate) const SCALE: u64 = 1 << SCALE_BITS;

/// Integer masses summing to `SCALE`, by largest remainder (lowest index on ties).
pub(crate) fn quantize(weights: &[f64]) -> Vec<u64> {
    let total: f64 = weights.iter().sum();
    let scaled: Vec<f64> = weights.iter().map(|w| w / total * SCALE as f64).collect();
    let mut q: Vec<u64> = scaled.iter().map(|s| s.floor() as u64).collect();
    let assigned: u64 = q.iter().sum();
    let mut missing = SCALE.saturating_sub(assigned);
    if missing > 0 {
        let mut order: Vec<usize> = (0..q.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = scaled[a] - scaled[a].floor();
            let rb = scaled[b] - scaled[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().cycle() {
            if missing == 0 {
                break;
            }
            q[i] += 1;
            missing -= 1;
        }
    }
    q
}

/// Optimal plan: `(supply index, demand index, integer mass)` triples plus total cost
/// in units of `SCALE`.
pub(crate) struct Plan {
    pub flows: Vec<(usize, usize, u64)>,
    pub cost: f64,
}

/// Minimum-cost transport from `supply` to `demand` (both summing to `SCALE`)
/// under the dense cost matrix `cost[i * demand.len() + j]`.
pub(crate) fn transport(supply: &[u64], demand: &[u64], cost: &[f64]) -> Plan {
    let m = supply.len();
    let k = demand.len();
    debug_assert_eq!(cost.len(), m * k);
    debug_assert_eq!(supply.iter().sum::<u64>(), demand.iter().sum::<u64>());

    let mut rem_s = supply.to_vec();
    let mut rem_d = demand.to_vec();
    let mut flow = vec![0u64; m * k];
    // node layout: supplies 0..m, demands m..m+k, sink m+k; the source is implicit
    let nodes = m + k + 1;
    let sink = m + k;
    let mut pot = vec![0.0f64; nodes];
    let mut dist = vec![f64::INFINITY; nodes];
    let mut prev = vec![usize::MAX; nodes];
    let mut done = vec![false; nodes];

    loop {
        dist.fill(f64::INFINITY);
        prev.fill(usize::MAX);
        done.fill(false);
        for i in 0..m {
            if rem_s[i] > 0 {
                dist[i] = 0.0;
            }
        }
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..nodes {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX || u == sink {
                break;
            }
            done[u] = true;
            let relax = |v: usize, c: f64, dist: &mut [f64], prev: &mut [usize]| {
                let reduced = (c + pot[u] - pot[v]).max(0.0);
                if best + reduced < dist[v] {
                    dist[v] = best + reduced;
                    prev[v] = u;
                }
            };
            if u < m {
                for j in 0..k {
                    if !done[m + j] {
                        relax(m + j, cost[u * k + j], &mut dist, &mut prev);
                    }
                }
            } else {
                let j = u - m;
                for i in 0..m {
                    if !done[i] && flow[i * k + j] > 0 {
                        relax(i, -cost[i * k + j], &mut dist, &mut prev);
                    }
                }
                if rem_d[j] > 0 && !done[sink] {
                    relax(sink, 0.0, &mut dist, &mut prev);
                }
            }
        }
        if !dist[sink].is_finite() {
            break;
        }
        let reach = dist[sink];
        for v in 0..nodes {
            pot[v] += dist[v].min(reach);
        }
        // walk back from the sink to find the bottleneck
        let last = prev[sink];
        let mut amount = rem_d[last - m];
        let mut v = last;
        loop {
            let u = prev[v];
            if u == usize::MAX {
                amount = amount.min(rem_s[v]);
                break;
            }
            if u >= m {
                // backward arc demand u -> supply v
                amount = amount.min(flow[v * k + (u - m)]);
            }
            v = u;
        }
        rem_d[last - m] -= amount;
        let mut v = last;
        loop {
            let u = prev[v];
            if u == usize::MAX {
                rem_s[v] -= amount;
                break;
            }
            if u < m {
                flow[u * k + (v - m)] += amount;
            } else {
                flow[v * k + (u - m)] -= amount;
            }
            v = u;
        }
    }

    let mut flows = Vec::new();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..k {
            let f = flow[i * k + j];
            if f > 0 {
                flows.push((i, j, f));
                total += f as f64 * cost[i * k + j];
            }
        }
    }
    Plan { flows, cost: total }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_sums_to_scale() {
        for w in [vec![1.0 / 3.0; 3], vec![0.5, 0.25, 0.25], vec![0.1, 0.2, 0.7], vec![1.0]] {
            let q = quantize(&w);
            assert_eq!(q.iter().sum::<u64>(), SCALE);
        }
        assert_eq!(quantize(&[0.5, 0.25, 0.25]), vec![SCALE / 2, SCALE / 4, SCALE / 4]);
    }

    /// Exhaustive check against the vertex enumeration of a 2x2 problem.
    #[test]
    fn two_by_two() {
        let s = quantize(&[0.5, 0.5]);
        let d = quantize(&[0.25, 0.75]);
        let cost = [0.0, 1.0, 1.0, 0.0];
        let plan = transport(&s, &d, &cost);
        assert_eq!(plan.cost, (SCALE / 4) as f64);
    }

    #[test]
    fn needs_backward_arcs() {
        // greedy nearest assignment is suboptimal here
        let s = quantize(&[0.5, 0.5]);
        let d = quantize(&[0.5, 0.5]);
        let cost = [1.0, 2.0, 1.0, 10.0];
        let plan = transport(&s, &d, &cost);
        assert_eq!(plan.cost, 1.5 * SCALE as f64);
        let shipped: u64 = plan.flows.iter().map(|f| f.2).sum();
        assert_eq!(shipped, SCALE);
    }
}
