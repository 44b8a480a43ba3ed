//! The block-union example: small entropy ratios for mixtures over finitely
//! many blocks, the convexity bound against the analytic block entropies, and
//! cross-checks of the closed forms against enumeration.

use rand::Rng;
use serde_json::json;

use super::TrialContext;
use crate::entropy::{
    block_brin_katok_average, block_katok_count, brin_katok_average, cylinder_mass, cylinder_regime,
    katok_growth, katok_on_space, word_ball_mass,
};
use crate::error::{invalid, Result};
use crate::estimators::{dimension_report, growth_rate, growth_rate_log};
use crate::measures::{BallKind, ComponentDecomposition, FiniteMeasure, MeasureRule};
use crate::metric::{exhaustive_lift, Word};
use crate::systems::{make_block_system, Constraint, ParamRule, SymbolicSystem};

const BLOCKS: usize = 3;
const HALF_WIDTH: usize = 2;
const DELTA: f64 = 0.1;
const HORIZONS: std::ops::RangeInclusive<usize> = 1..=8;
const BK_RATIO_MAX: f64 = 0.2;
const KATOK_RATIO_MAX: f64 = 0.25;
/// Relative window around `ln 3` for the slope on the first block.
const X1_SLOPE_TOL: f64 = 0.1;
const SLACK: f64 = 1e-12;

/// `eps = 2^-11, ..., 2^-24`.
pub fn ladder() -> Vec<f64> {
    (11..=24).map(|k| 2f64.powi(-k)).collect()
}

/// `(name, t_0, [t_1, t_2, t_3])`.
pub const MIXTURES: [(&str, f64, [f64; 3]); 3] = [
    ("uniform", 0.25, [0.25, 0.25, 0.25]),
    ("geometric", 0.125, [0.5, 0.25, 0.125]),
    ("heavy", 0.75, [0.125, 0.0625, 0.0625]),
];

fn decomposition(sys: &SymbolicSystem, t0: f64, t: &[f64; 3]) -> Result<ComponentDecomposition> {
    let weights: Vec<(usize, f64)> = t.iter().enumerate().map(|(k, &w)| (k + 1, w)).collect();
    ComponentDecomposition::uniform_blocks(sys, t0, &weights)
}

/// Letters of each block, the fixed-point letter, and the block sizes.
type BlockLayout<'a> = (&'a [Vec<u16>], u16, Vec<u64>);

fn blocks_of(sys: &SymbolicSystem) -> Result<BlockLayout<'_>> {
    match sys.constraint() {
        Constraint::BlockUnion {
            params,
            blocks,
            fixed_point: Some(f),
        } => Ok((blocks, *f, params.b.clone())),
        _ => invalid("expected a block system with its fixed point"),
    }
}

fn entropy_of(t: &[f64]) -> f64 {
    t.iter().filter(|&&x| x > 0.0).map(|x| -x * x.ln()).sum()
}

/// A word over `[-W, n-1+W]` drawn from the mixture, with its component (0 = fixed point).
fn sample_word(
    ctx: &mut TrialContext,
    sys: &SymbolicSystem,
    t0: f64,
    t: &[f64; 3],
    n: usize,
) -> Result<(usize, Word)> {
    let (blocks, fixed, _) = blocks_of(sys)?;
    let len = sys.word_len(n);
    let u: f64 = ctx.rng.random();
    let mut acc = t0;
    let mut k = 0;
    while u >= acc && k < t.len() {
        acc += t[k];
        k += 1;
    }
    let letters = if k == 0 {
        vec![fixed; len]
    } else {
        let b = &blocks[k - 1];
        (0..len).map(|_| b[ctx.rng.random_range(0..b.len())]).collect()
    };
    Ok((k, Word::centered(sys.half_width(), letters)))
}

pub fn block(ctx: &mut TrialContext) -> Result<()> {
    let which = (ctx.trial % MIXTURES.len() as u64) as usize;
    let (name, t0, t) = MIXTURES[which];
    let sys = make_block_system(BLOCKS, ParamRule::PaperDefault, ParamRule::PaperDefault, HALF_WIDTH)?;
    let dec = decomposition(&sys, t0, &t)?;
    let rule = dec.rule(&sys)?;
    let (_, _, b) = blocks_of(&sys)?;
    let weights = [t0, t[0], t[1], t[2]];
    let h_t = entropy_of(&weights);
    let scales = ladder();
    let finest = *scales.last().expect("nonempty ladder");
    ctx.truth("ladder inside the single-word regime", scales.iter().all(|&e| cylinder_regime(&sys, e)));

    // (i) and (ii): ratio estimates over the ladder
    let mut bk_fits = Vec::new();
    let mut katok_fits = Vec::new();
    for &eps in &scales {
        let mut bk = Vec::new();
        let mut counts = Vec::new();
        for n in HORIZONS {
            let avg = block_brin_katok_average(&sys, &dec, n, eps)?;
            bk.push((n, n as f64 * avg));
            counts.push((n, block_katok_count(&sys, &dec, n, eps, DELTA)?));
            // (iii) against the analytic block entropies
            if eps == finest {
                let len = sys.word_len(n) as f64;
                let bound = (t.iter().zip(&b).map(|(tk, bk)| tk * len * (*bk as f64).ln()).sum::<f64>()
                    + h_t)
                    / n as f64;
                ctx.le_tol(format!("{name}: averaged decay <= block-entropy bound at n={n}"), avg, bound, SLACK);
            }
        }
        bk_fits.push(growth_rate_log(&bk, None)?);
        katok_fits.push(growth_rate(&counts, None)?);
    }
    let bk_report = dimension_report(&bk_fits, &scales)?;
    let katok_report = dimension_report(&katok_fits, &scales)?;
    let bk_ratio = *bk_report.ratios.last().expect("nonempty");
    let katok_ratio = *katok_report.ratios.last().expect("nonempty");
    ctx.le(format!("{name}: Brin-Katok ratio at finest eps"), bk_ratio, BK_RATIO_MAX);
    ctx.le(format!("{name}: Katok ratio at finest eps (delta = {DELTA})"), katok_ratio, KATOK_RATIO_MAX);
    ctx.record(format!("{name}.bk_ratio"), bk_ratio);
    ctx.record(format!("{name}.bk_ratio_upper"), bk_report.ratio_upper);
    ctx.record(format!("{name}.bk_ratio_lower"), bk_report.ratio_lower);
    ctx.record(format!("{name}.katok_ratio"), katok_ratio);
    ctx.record(format!("{name}.katok_ratio_upper"), katok_report.ratio_upper);
    ctx.record(format!("{name}.katok_ratio_lower"), katok_report.ratio_lower);

    // (iii) per point: a sampled word against its own component
    let n = ctx.rng.random_range(HORIZONS);
    let (k, x) = sample_word(ctx, &sys, t0, &t, n)?;
    ctx.describe(json!({ "mixture": name, "n": n, "component": k, "x": x.letters() }));
    let mass = cylinder_mass(&sys, &rule, &x, n)?;
    let nf = n as f64;
    let component_decay = if k == 0 { 0.0 } else { sys.word_len(n) as f64 * (b[k - 1] as f64).ln() / nf };
    ctx.le_tol(
        format!("{name}: pointwise decay <= component decay - ln t_k / n"),
        -mass.ln() / nf,
        component_decay - weights[k].ln() / nf,
        SLACK,
    );

    // cylinder mass against brute-force ball mass on a narrower window
    let narrow = make_block_system(BLOCKS, ParamRule::PaperDefault, ParamRule::PaperDefault, 1)?;
    let narrow_rule = decomposition(&narrow, t0, &t)?.rule(&narrow)?;
    let eps1 = narrow.alphabet().min_gap() / 2.0;
    let (_, y) = sample_word(ctx, &narrow, t0, &t, 1)?;
    ctx.eq(
        format!("{name}: cylinder mass = enumerated ball mass"),
        cylinder_mass(&narrow, &narrow_rule, &y, 1)?,
        word_ball_mass(&narrow, &narrow_rule, &y, 1, eps1, BallKind::Open, &ctx.budget)?,
    );

    coarse_convexity(ctx, name, t0, &t)?;
    if ctx.trial < MIXTURES.len() as u64 {
        closed_forms_match_enumeration(ctx, name, t0, &t)?;
    }
    if ctx.trial == 0 {
        first_block_slope(ctx)?;
    }
    Ok(())
}

/// Outside the single-word regime: the convexity bound by enumeration at `W = 0`.
fn coarse_convexity(ctx: &mut TrialContext, name: &str, t0: f64, t: &[f64; 3]) -> Result<()> {
    let sys = make_block_system(BLOCKS, ParamRule::PaperDefault, ParamRule::PaperDefault, 0)?;
    let n = ctx.rng.random_range(1..=2usize);
    let eps = ctx.rng.random_range(1..=64) as f64 / 128.0;
    let space = exhaustive_lift(&sys, n, &ctx.budget)?;
    let dec = decomposition(&sys, t0, t)?;
    let mu = dec.rule(&sys)?.on_space(&space)?;
    let (_, fixed, _) = blocks_of(&sys)?;
    let mut parts: Vec<(f64, FiniteMeasure)> = vec![(t0, MeasureRule::Constant(fixed).on_space(&space)?)];
    for (_, tk, r) in &dec.components {
        parts.push((*tk, r.on_space(&space)?));
    }
    let mut bound = entropy_of(&parts.iter().map(|p| p.0).collect::<Vec<_>>()) / n as f64;
    for (tk, m) in &parts {
        bound += tk * brin_katok_average(m, &space, n, eps)?;
    }
    let avg = brin_katok_average(&mu, &space, n, eps)?;
    ctx.le_tol(format!("{name}: coarse averaged convexity at n={n}, eps={eps}"), avg, bound, SLACK);
    Ok(())
}

/// Closed forms against exhaustive computation on the `W = 0` lift.
fn closed_forms_match_enumeration(ctx: &mut TrialContext, name: &str, t0: f64, t: &[f64; 3]) -> Result<()> {
    let sys = make_block_system(BLOCKS, ParamRule::PaperDefault, ParamRule::PaperDefault, 0)?;
    let dec = decomposition(&sys, t0, t)?;
    let rule = dec.rule(&sys)?;
    let eps = sys.alphabet().min_gap();
    for n in 1..=2 {
        let space = exhaustive_lift(&sys, n, &ctx.budget)?;
        let mu = rule.on_space(&space)?;
        ctx.eq_tol(
            format!("{name}: closed-form Brin-Katok = enumeration at n={n}"),
            block_brin_katok_average(&sys, &dec, n, eps)?,
            brin_katok_average(&mu, &space, n, eps)?,
            1e-9,
        );
        ctx.eq(
            format!("{name}: closed-form Katok = enumeration at n={n}"),
            block_katok_count(&sys, &dec, n, eps, DELTA)?,
            katok_on_space(&mu, &space, n, eps, DELTA, BallKind::Open, true, &ctx.budget)?.value as f64,
        );
    }
    Ok(())
}

/// Katok growth on the first block alone is close to `ln b_1 = ln 3`.
fn first_block_slope(ctx: &mut TrialContext) -> Result<()> {
    let sys = make_block_system(1, ParamRule::PaperDefault, ParamRule::PaperDefault, 0)?;
    let rule = ComponentDecomposition::uniform_blocks(&sys, 0.0, &[(1, 1.0)])?.rule(&sys)?;
    let eps = sys.block_params().expect("block system").eps[0] / 2.0;
    let ns: Vec<usize> = (1..=5).collect();
    let curve = katok_growth(&sys, &rule, eps, DELTA, &ns, true, &ctx.budget)?;
    let target = 3f64.ln();
    ctx.le(
        "first block: |Katok slope - ln 3| <= 10% of ln 3",
        (curve.fit.slope - target).abs(),
        X1_SLOPE_TOL * target,
    );
    ctx.record("x1.katok_slope", curve.fit.slope);
    Ok(())
}
