//! Relations between separated, spanning and cover counts.

use rand::Rng;
use serde_json::json;

use super::gen;
use super::TrialContext;
use crate::covering::{count, greedy_net, CountKind, CountMethod};
use crate::error::Result;
use crate::metric::{exhaustive_lift, FiniteMetricSpace};

const SCALES_PER_SPACE: usize = 5;

fn exact(space: &FiniteMetricSpace, eps: f64, kind: CountKind, ctx: &TrialContext) -> Result<f64> {
    Ok(count(space, eps, kind, CountMethod::BranchBound, &ctx.budget)?.value as f64)
}

/// Random scales as fractions of the diameter, sorted decreasing.
fn scales(ctx: &mut TrialContext, diam: f64) -> Vec<f64> {
    let mut e: Vec<f64> = (0..SCALES_PER_SPACE)
        .map(|_| diam * ctx.rng.random_range(0.02..0.75))
        .collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

/// `N(2e) <= R(e) <= S(e) <= R(e/2) <= N(e/2)`, monotonicity, greedy-net witnesses.
pub fn chain(ctx: &mut TrialContext) -> Result<()> {
    let (space, desc) = gen::plane(&mut ctx.rng, 2, 40)?;
    let ladder = scales(ctx, space.diam().max(f64::MIN_POSITIVE));
    ctx.describe(json!({ "space": desc, "eps": ladder }));
    let mut previous: Option<[f64; 3]> = None;
    for &eps in &ladder {
        let n2 = exact(&space, 2.0 * eps, CountKind::OpenBallCover, ctx)?;
        let r = exact(&space, eps, CountKind::Spanning, ctx)?;
        let s = exact(&space, eps, CountKind::Separated, ctx)?;
        let r_half = exact(&space, eps / 2.0, CountKind::Spanning, ctx)?;
        let n_half = exact(&space, eps / 2.0, CountKind::OpenBallCover, ctx)?;
        ctx.le(format!("N(2e) <= R(e) at e={eps}"), n2, r);
        ctx.le(format!("R(e) <= S(e) at e={eps}"), r, s);
        ctx.le(format!("S(e) <= R(e/2) at e={eps}"), s, r_half);
        ctx.le(format!("R(e/2) <= N(e/2) at e={eps}"), r_half, n_half);

        let net = greedy_net(&space, eps, 0);
        let separated = net
            .iter()
            .all(|&i| net.iter().all(|&j| i == j || space.dist(i, j) > eps));
        let covers = (0..space.len()).all(|x| net.iter().any(|&c| space.dist(x, c) <= eps));
        ctx.truth(format!("greedy net is separated at e={eps}"), separated);
        ctx.truth(format!("greedy net covers with closed balls at e={eps}"), covers);
        ctx.le(format!("|net| <= S(e) at e={eps}"), net.len() as f64, s);

        // the ladder is decreasing, so counts must not drop
        let now = [r, s, n_half];
        if let Some(before) = previous {
            ctx.le(format!("R monotone at e={eps}"), before[0], now[0]);
            ctx.le(format!("S monotone at e={eps}"), before[1], now[1]);
        }
        previous = Some(now);
    }
    Ok(())
}

/// `N(2e) <= C(e) <= N(e)`.
pub fn closed_open(ctx: &mut TrialContext) -> Result<()> {
    let (space, desc) = gen::plane(&mut ctx.rng, 2, 40)?;
    let ladder = scales(ctx, space.diam().max(f64::MIN_POSITIVE));
    ctx.describe(json!({ "space": desc, "eps": ladder }));
    let mut previous = None;
    for &eps in &ladder {
        let n2 = exact(&space, 2.0 * eps, CountKind::OpenBallCover, ctx)?;
        let c = exact(&space, eps, CountKind::ClosedBallCover, ctx)?;
        let n = exact(&space, eps, CountKind::OpenBallCover, ctx)?;
        ctx.le(format!("N(2e) <= C(e) at e={eps}"), n2, c);
        ctx.le(format!("C(e) <= N(e) at e={eps}"), c, n);
        if let Some(before) = previous {
            ctx.le(format!("C monotone at e={eps}"), before, c);
        }
        previous = Some(c);
    }
    Ok(())
}

/// `N(n + m, e) <= N(n, e) N(m, e)` on Bowen lifts of small full shifts.
pub fn subadd(ctx: &mut TrialContext) -> Result<()> {
    let (sys, desc) = gen::small_shift(&mut ctx.rng, 3, 0)?;
    let n = ctx.rng.random_range(1..=3usize);
    let m = ctx.rng.random_range(1..=4 - n);
    let eps = gen::dyadic_eps(&mut ctx.rng, 1.0 / 32.0, 1.0);
    ctx.describe(json!({ "system": desc, "n": n, "m": m, "eps": eps }));
    let cover = |h: usize, ctx: &TrialContext| -> Result<f64> {
        exact(&exhaustive_lift(&sys, h, &ctx.budget)?, eps, CountKind::OpenBallCover, ctx)
    };
    let joint = cover(n + m, ctx)?;
    let product = cover(n, ctx)? * cover(m, ctx)?;
    ctx.le(format!("N({}) <= N({n}) N({m})", n + m), joint, product);
    Ok(())
}
