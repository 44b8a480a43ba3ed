//! Comparisons between Wasserstein and Lévy-Prokhorov distances.

use rand::Rng;
use serde_json::json;

use super::gen;
use super::TrialContext;
use crate::error::Result;
use crate::transport::{levy_prokhorov, levy_prokhorov_subsets, wasserstein};

/// Slack on every comparison that goes through a power of a computed distance.
const SLACK: f64 = 1e-9;
/// Largest support used when comparing against the subset oracle.
const STRASSEN_SUPPORT: usize = 6;

const EXPONENTS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];

/// Power-mean comparisons, LP against `W_p`, and metric axioms on a triple.
pub fn metric_relations(ctx: &mut TrialContext) -> Result<()> {
    let (space, desc) = gen::plane(&mut ctx.rng, 2, 10)?;
    let mu = gen::measure(&mut ctx.rng, &space, 6, false)?;
    let nu = gen::measure(&mut ctx.rng, &space, 6, false)?;
    let rho = gen::measure(&mut ctx.rng, &space, 6, false)?;
    let mut pq = [
        EXPONENTS[ctx.rng.random_range(0..4)],
        EXPONENTS[ctx.rng.random_range(0..4)],
    ];
    pq.sort_by(f64::total_cmp);
    let [q, p] = pq;
    ctx.describe(json!({
        "space": desc, "mu": mu.weights(), "nu": nu.weights(), "rho": rho.weights(),
        "p": p, "q": q,
    }));
    let diam = space.diam();
    let wp = wasserstein(&mu, &nu, &space, p)?.value;
    let wq = wasserstein(&mu, &nu, &space, q)?.value;
    let lp = levy_prokhorov(&mu, &nu, &space)?;

    ctx.le_tol(format!("W_{q} <= W_{p}"), wq, wp, SLACK);
    ctx.le_tol(
        format!("W_{p} <= diam^(1-q/p) W_{q}^(q/p)"),
        wp,
        diam.powf(1.0 - q / p) * wq.powf(q / p),
        SLACK,
    );
    ctx.le_tol(format!("LP^(1+1/{p}) <= W_{p}"), lp.powf(1.0 + 1.0 / p), wp, SLACK);
    ctx.le_tol(
        format!("W_{p} <= (1+diam^p)^(1/p) LP^(1/p)"),
        wp,
        (1.0 + diam.powf(p)).powf(1.0 / p) * lp.powf(1.0 / p),
        SLACK,
    );

    // axioms
    let back = wasserstein(&nu, &mu, &space, p)?.value;
    ctx.eq(format!("W_{p} symmetric"), wp, back);
    ctx.eq("LP symmetric", lp, levy_prokhorov(&nu, &mu, &space)?);
    ctx.eq(format!("W_{p}(mu, mu) = 0"), wasserstein(&mu, &mu, &space, p)?.value, 0.0);
    ctx.eq("LP(mu, mu) = 0", levy_prokhorov(&mu, &mu, &space)?, 0.0);
    let w_mr = wasserstein(&mu, &rho, &space, p)?.value;
    let w_rn = wasserstein(&rho, &nu, &space, p)?.value;
    ctx.le_tol(format!("W_{p} triangle"), wp, w_mr + w_rn, SLACK);
    let l_mr = levy_prokhorov(&mu, &rho, &space)?;
    let l_rn = levy_prokhorov(&rho, &nu, &space)?;
    ctx.le_tol("LP triangle", lp, l_mr + l_rn, SLACK);
    Ok(())
}

/// Coupling-scan LP equals the subset-enumeration LP; optimal couplings have the right marginals.
pub fn strassen(ctx: &mut TrialContext) -> Result<()> {
    let (space, desc) = gen::plane(&mut ctx.rng, 2, 10)?;
    let mu = gen::measure(&mut ctx.rng, &space, STRASSEN_SUPPORT, true)?;
    let nu = gen::measure(&mut ctx.rng, &space, STRASSEN_SUPPORT, true)?;
    ctx.describe(json!({ "space": desc, "mu": mu.weights(), "nu": nu.weights() }));
    let scan = levy_prokhorov(&mu, &nu, &space)?;
    let subsets = levy_prokhorov_subsets(&mu, &nu, &space)?;
    ctx.eq("coupling LP = subset LP", scan, subsets);
    let w = wasserstein(&mu, &nu, &space, 1.0)?;
    ctx.le("coupling marginals", w.coupling.marginal_error(&mu, &nu), SLACK);
    Ok(())
}
