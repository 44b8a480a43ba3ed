//! Katok, Shapira and Brin-Katok quantities against each other and against covers.

use rand::Rng;
use serde_json::json;

use super::gen;
use super::TrialContext;
use crate::covering::{count, CountKind, CountMethod};
use crate::entropy::{brin_katok_average, generate_cover, katok_on_space, shapira_number};
use crate::error::{Error, Result};
use crate::estimators::growth_rate_log;
use crate::measures::{ball_mass, convex_combine, BallKind, FiniteMeasure, MeasureRule};
use crate::metric::{exhaustive_lift, Point};
use crate::systems::{make_grid_alphabet, LetterDist, SymbolicSystem};

/// Slack for relations that hold with equality in exact arithmetic but go
/// through `ln` of float sums.
const LOG_SLACK: f64 = 1e-12;

/// Regression tolerance for the pointwise decay-versus-covering slope check.
const SLOPE_TOL: f64 = 0.05;

/// `K(n, e, d) <= Sh(U^n, d) <= K(n, e/4, d)` plus monotonicity of `K`.
pub fn katok_shapira(ctx: &mut TrialContext) -> Result<()> {
    let (sys, desc) = gen::small_shift(&mut ctx.rng, 3, 0)?;
    let nu = gen::letter_dist(&mut ctx.rng, sys.alphabet().len());
    let rule = MeasureRule::Product(nu.clone());
    let n = ctx.rng.random_range(1..=3usize);
    let eps = gen::dyadic_eps(&mut ctx.rng, 1.0 / 16.0, 1.0);
    let delta = ctx.rng.random_range(1..=15) as f64 / 16.0;
    ctx.describe(json!({ "system": desc, "nu": nu.0, "n": n, "eps": eps, "delta": delta }));

    let windows = exhaustive_lift(&sys, 1, &ctx.budget)?;
    let cover = generate_cover(&windows, eps)?;
    ctx.truth("cover diameter below eps", cover.diam < eps);
    ctx.le("eps/4 <= Lebesgue number", eps / 4.0, cover.leb);

    let space = exhaustive_lift(&sys, n, &ctx.budget)?;
    let mu = rule.on_space(&space)?;
    let budget = ctx.budget;
    let katok = |e: f64, d: f64| -> Result<f64> {
        Ok(katok_on_space(&mu, &space, n, e, d, BallKind::Open, true, &budget)?.value as f64)
    };
    let shapira = shapira_number(&sys, &windows, &cover, &rule, n, delta, true, &budget)?.value as f64;
    let k = katok(eps, delta)?;
    let k_fine = katok(eps / 4.0, delta)?;
    ctx.le("K(n, e, d) <= Sh(n, d)", k, shapira);
    ctx.le("Sh(n, d) <= K(n, e/4, d)", shapira, k_fine);
    ctx.le("K nonincreasing in eps", k, k_fine);
    if delta < 15.0 / 16.0 {
        let looser = katok(eps, delta + 1.0 / 16.0)?;
        ctx.le("K nonincreasing in delta", looser, k);
    }
    Ok(())
}

/// Averaged Brin-Katok value against covering growth, plus the pointwise slope
/// comparison on uniform grid shifts.
pub fn bk_bound(ctx: &mut TrialContext) -> Result<()> {
    // averaged form on a random product measure
    let hw = ctx.rng.random_range(0..=1usize);
    let (sys, desc) = gen::small_shift(&mut ctx.rng, 3, hw)?;
    let nu = gen::letter_dist(&mut ctx.rng, sys.alphabet().len());
    let n = ctx.rng.random_range(1..=3 - hw);
    let eps = gen::dyadic_eps(&mut ctx.rng, 1.0 / 16.0, 1.0);

    // pointwise form: uniform product on a grid, W = 0
    let m = ctx.rng.random_range(2..=4usize);
    let grid = SymbolicSystem::full_shift(make_grid_alphabet(m)?, 0);
    let grid_eps = gen::dyadic_eps(&mut ctx.rng, 1.0 / 16.0, 1.0);
    ctx.describe(json!({
        "system": desc, "nu": nu.0, "n": n, "eps": eps,
        "grid_m": m, "grid_eps": grid_eps,
    }));

    let space = exhaustive_lift(&sys, n, &ctx.budget)?;
    let mu = MeasureRule::Product(nu).on_space(&space)?;
    let avg = brin_katok_average(&mu, &space, n, eps)?;
    let cover = count(&space, eps / 2.0, CountKind::OpenBallCover, CountMethod::BranchBound, &ctx.budget)?;
    ctx.le_tol(
        "averaged decay <= (1/n) ln N(n, e/2)",
        avg,
        (cover.value as f64).ln() / n as f64,
        LOG_SLACK,
    );

    let uniform = MeasureRule::Product(LetterDist::uniform(m));
    let horizons = [1usize, 2, 3];
    let lifts = horizons
        .iter()
        .map(|&h| exhaustive_lift(&grid, h, &ctx.budget))
        .collect::<Result<Vec<_>>>()?;
    let measures = lifts
        .iter()
        .map(|s| uniform.on_space(s))
        .collect::<Result<Vec<_>>>()?;
    let covers = lifts
        .iter()
        .map(|s| {
            let c = count(s, grid_eps / 2.0, CountKind::OpenBallCover, CountMethod::BranchBound, &ctx.budget)?;
            Ok((c.value as f64).ln())
        })
        .collect::<Result<Vec<_>>>()?;
    let cover_curve: Vec<(usize, f64)> = horizons.iter().copied().zip(covers).collect();
    let cover_slope = growth_rate_log(&cover_curve, None)?.slope;

    // a point of the longest lift, traced back through the shorter ones by prefix
    let longest = lifts.last().expect("three horizons");
    let x = ctx.rng.random_range(0..longest.len());
    let Point::Word(xw) = &longest.points()[x] else {
        unreachable!("lifts hold words")
    };
    let mut decay = Vec::new();
    for ((&h, s), mu_h) in horizons.iter().zip(&lifts).zip(&measures) {
        let prefix = &xw.letters()[..h];
        let idx = s
            .points()
            .iter()
            .position(|p| matches!(p, Point::Word(w) if w.letters() == prefix))
            .ok_or_else(|| Error::Degenerate("prefix missing from lift".into()))?;
        let mass = ball_mass(mu_h, s, idx, grid_eps, BallKind::Open)?;
        decay.push((h, -mass.ln()));
    }
    let local_slope = growth_rate_log(&decay, None)?.slope;
    ctx.le_tol(
        "local decay slope <= covering slope at e/2",
        local_slope,
        cover_slope,
        SLOPE_TOL,
    );
    Ok(())
}

/// Mixture decay against component decay: per point and averaged.
pub fn bk_convex(ctx: &mut TrialContext) -> Result<()> {
    let hw = ctx.rng.random_range(0..=1usize);
    let (sys, desc) = gen::small_shift(&mut ctx.rng, 3, hw)?;
    let n = ctx.rng.random_range(1..=3 - hw);
    let eps = gen::dyadic_eps(&mut ctx.rng, 1.0 / 32.0, 1.0);
    let parts = ctx.rng.random_range(2..=3usize);
    let t = gen::dyadic_dirichlet(&mut ctx.rng, parts);
    let laws: Vec<LetterDist> = (0..parts)
        .map(|_| gen::letter_dist(&mut ctx.rng, sys.alphabet().len()))
        .collect();
    ctx.describe(json!({
        "system": desc, "n": n, "eps": eps, "t": t,
        "components": laws.iter().map(|l| &l.0).collect::<Vec<_>>(),
    }));

    let space = exhaustive_lift(&sys, n, &ctx.budget)?;
    let components = laws
        .iter()
        .map(|l| MeasureRule::Product(l.clone()).on_space(&space))
        .collect::<Result<Vec<FiniteMeasure>>>()?;
    let weighted: Vec<(f64, &FiniteMeasure)> = t.iter().copied().zip(&components).collect();
    let mu = convex_combine(&weighted)?;
    let nf = n as f64;

    for (k, (tk, mk)) in weighted.iter().enumerate() {
        for x in mk.support() {
            let whole = ball_mass(&mu, &space, x, eps, BallKind::Open)?;
            let part = ball_mass(mk, &space, x, eps, BallKind::Open)?;
            ctx.le_tol(
                format!("component {k} at point {x}: mixture decay <= component decay - ln t / n"),
                -whole.ln() / nf,
                -part.ln() / nf - tk.ln() / nf,
                LOG_SLACK,
            );
        }
    }
    let avg = brin_katok_average(&mu, &space, n, eps)?;
    let mut bound = -t.iter().map(|tk| tk * tk.ln()).sum::<f64>() / nf;
    for (tk, mk) in &weighted {
        bound += tk * brin_katok_average(mk, &space, n, eps)?;
    }
    ctx.le_tol("averaged mixture <= sum t_k avg_k + H(t)/n", avg, bound, LOG_SLACK);
    Ok(())
}
