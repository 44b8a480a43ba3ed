//! Quantization numbers against Katok numbers and under measure domination.

use rand::Rng;
use serde_json::json;

use super::gen;
use super::TrialContext;
use crate::entropy::katok_on_space;
use crate::error::Result;
use crate::measures::{convex_combine, dominates, BallKind, FiniteMeasure, MeasureRule};
use crate::metric::{exhaustive_lift, FiniteMetricSpace};
use crate::quantization::{quantization_number, QuantKind, QuantMethod};

/// Guard that keeps the strict `delta < (eps/diam)^p / 2` strict after rounding.
const DELTA_MARGIN: f64 = 0.5;

/// Random Bowen lift with at most 27 points and a product measure on it.
fn lifted_instance(ctx: &mut TrialContext) -> Result<(FiniteMetricSpace, FiniteMeasure, serde_json::Value)> {
    let hw = ctx.rng.random_range(0..=1usize);
    let (sys, desc) = gen::small_shift(&mut ctx.rng, 3, hw)?;
    // words span n + 2W coordinates over at most 3 letters
    let n = ctx.rng.random_range(1..=3 - 2 * hw);
    let nu = gen::letter_dist(&mut ctx.rng, sys.alphabet().len());
    let space = exhaustive_lift(&sys, n, &ctx.budget)?;
    let mu = MeasureRule::Product(nu.clone()).on_space(&space)?;
    Ok((space, mu, json!({ "system": desc, "n": n, "nu": nu.0 })))
}

fn quant(
    mu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    eps: f64,
    kind: QuantKind,
    ctx: &TrialContext,
) -> Result<f64> {
    Ok(quantization_number(mu, space, eps, kind, QuantMethod::Exact, &ctx.budget)?.value as f64)
}

fn katok(
    mu: &FiniteMeasure,
    space: &FiniteMetricSpace,
    eps: f64,
    delta: f64,
    kind: BallKind,
    ctx: &TrialContext,
) -> Result<f64> {
    Ok(katok_on_space(mu, space, 0, eps, delta, kind, true, &ctx.budget)?.value as f64)
}

/// `Q_W1(e) >= K(2e, 3/4)` and `Q_Wp(e) <= K(2^(-1/p) e, d)` for `d < (e/diam)^p / 2`.
pub fn markov(ctx: &mut TrialContext) -> Result<()> {
    let (space, mu, desc) = lifted_instance(ctx)?;
    let diam = space.diam();
    let p = [1.0, 2.0, 3.0][ctx.rng.random_range(0..3)];
    let eps = gen::dyadic_eps(&mut ctx.rng, 1.0 / 32.0, 1.0);
    ctx.describe(json!({ "instance": desc, "p": p, "eps": eps }));

    let q1 = quant(&mu, &space, eps, QuantKind::Wp(1.0), ctx)?;
    ctx.le("K(2e, 3/4) <= Q_W1(e)", katok(&mu, &space, 2.0 * eps, 0.75, BallKind::Open, ctx)?, q1);

    if eps < diam {
        let qp = quant(&mu, &space, eps, QuantKind::Wp(p), ctx)?;
        let delta = DELTA_MARGIN * (eps / diam).powf(p) / 2.0;
        let radius = eps * 2f64.powf(-1.0 / p);
        let k = katok(&mu, &space, radius, delta, BallKind::Open, ctx)?;
        ctx.le(format!("Q_W{p}(e) <= K(2^(-1/p) e, d)"), qp, k);
        let coarser = quant(&mu, &space, 2.0 * eps, QuantKind::Wp(p), ctx)?;
        ctx.le(format!("Q_W{p} nonincreasing in eps"), coarser, qp);
    } else {
        ctx.eq("Q = 1 once eps >= diam", quant(&mu, &space, eps, QuantKind::Wp(p), ctx)?, 1.0);
    }
    Ok(())
}

/// `mu = t nu + (1 - t) rho` dominates `t nu`, and `Q_mu(t e) >= Q_nu(e)` for `W_1`.
pub fn dominate(ctx: &mut TrialContext) -> Result<()> {
    let (space, desc) = gen::plane(&mut ctx.rng, 2, 12)?;
    let nu = gen::measure(&mut ctx.rng, &space, 12, true)?;
    let rho = gen::measure(&mut ctx.rng, &space, 12, true)?;
    let t = ctx.rng.random_range(1..=7) as f64 / 8.0;
    let eps = space.diam() * ctx.rng.random_range(1..=16) as f64 / 16.0;
    ctx.describe(json!({
        "space": desc, "nu": nu.weights(), "rho": rho.weights(), "t": t, "eps": eps,
    }));
    let mu = convex_combine(&[(t, &nu), (1.0 - t, &rho)])?;
    ctx.truth("mixture dominates t nu", dominates(&mu, &nu, t)?);
    let lhs = quant(&mu, &space, t * eps, QuantKind::Wp(1.0), ctx)?;
    let rhs = quant(&nu, &space, eps, QuantKind::Wp(1.0), ctx)?;
    ctx.le("Q_nu(e) <= Q_mu(t e)", rhs, lhs);
    Ok(())
}

/// `K_open(2e, e+) <= Q_LP(e) <= min(K_closed(e, e), K_open(e, e))`.
pub fn lp_katok(ctx: &mut TrialContext) -> Result<()> {
    let (space, mu, desc) = if ctx.rng.random_bool(0.5) {
        lifted_instance(ctx)?
    } else {
        let (space, d) = gen::plane(&mut ctx.rng, 2, 20)?;
        let mu = gen::measure(&mut ctx.rng, &space, 20, true)?;
        let desc = json!({ "space": d, "mu": mu.weights() });
        (space, mu, desc)
    };
    let eps = ctx.rng.random_range(1..=15) as f64 / 32.0;
    ctx.describe(json!({ "instance": desc, "eps": eps }));

    let q = quant(&mu, &space, eps, QuantKind::LP, ctx)?;
    // the quantizer needs mass >= 1 - e, the Katok number strictly more than 1 - delta
    let lower = katok(&mu, &space, 2.0 * eps, eps + 1e-12, BallKind::Open, ctx)?;
    ctx.le("K_open(2e, e) <= Q_LP(e)", lower, q);
    ctx.le("Q_LP(e) <= K_closed(e, e)", q, katok(&mu, &space, eps, eps, BallKind::Closed, ctx)?);
    ctx.le("Q_LP(e) <= K_open(e, e)", q, katok(&mu, &space, eps, eps, BallKind::Open, ctx)?);
    Ok(())
}
