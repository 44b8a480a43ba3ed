//! Growth rates in `n` and dimension ratios in `eps` from finite count tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares slope of `log count` against `n`, with secant-slope extremes
/// standing in for the limsup and liminf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub window: (usize, usize),
    /// Largest absolute residual of the fit.
    pub residual_max: f64,
    /// Largest slope between consecutive points.
    pub upper_proxy: f64,
    /// Smallest slope between consecutive points.
    pub lower_proxy: f64,
}

/// Fit `log count` over the points whose `n` lies in `window` (inclusive; all if `None`).
pub fn growth_rate(curve: &[(usize, f64)], window: Option<(usize, usize)>) -> Result<GrowthEstimate> {
    if let Some((n, c)) = curve.iter().find(|(_, c)| !(*c >= 1.0)) {
        return Err(Error::Degenerate(format!("count {c} at n = {n} is below 1")));
    }
    let logs: Vec<(usize, f64)> = curve.iter().map(|&(n, c)| (n, c.ln())).collect();
    growth_rate_log(&logs, window)
}

/// Same as [`growth_rate`] for curves already on a log scale.
pub fn growth_rate_log(
    curve: &[(usize, f64)],
    window: Option<(usize, usize)>,
) -> Result<GrowthEstimate> {
    let mut pts: Vec<(usize, f64)> = curve
        .iter()
        .copied()
        .filter(|&(n, _)| window.is_none_or(|(a, b)| n >= a && n <= b))
        .collect();
    pts.sort_by_key(|p| p.0);
    if pts.len() < 3 {
        return Err(Error::Degenerate(format!(
            "growth fit needs at least 3 points, got {}",
            pts.len()
        )));
    }
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Degenerate("repeated n in growth curve".into()));
    }
    if let Some(p) = pts.iter().find(|p| !p.1.is_finite()) {
        return Err(Error::Degenerate(format!("non-finite value at n = {}", p.0)));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0 as f64).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_max = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0 as f64).abs())
        .fold(0.0, f64::max);
    let secants: Vec<f64> = pts
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0) as f64)
        .collect();
    Ok(GrowthEstimate {
        slope,
        intercept,
        window: (pts[0].0, pts[pts.len() - 1].0),
        residual_max,
        upper_proxy: secants.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        lower_proxy: secants.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Rate-to-scale ratios over an `eps` ladder, summarized over its finer half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub ladder: Vec<f64>,
    pub rates: Vec<f64>,
    /// `rate / ln(1/eps)` per ladder entry.
    pub ratios: Vec<f64>,
    /// Number of finest entries the extremes range over.
    pub tail: usize,
    pub ratio_upper: f64,
    pub ratio_lower: f64,
    /// Per-scale growth fits, when the rates came from them.
    pub fits: Vec<GrowthEstimate>,
    /// Largest fit residual across scales.
    pub residual_max: f64,
}

/// Dimension report from per-scale growth fits.
pub fn dimension_report(rates: &[GrowthEstimate], ladder: &[f64]) -> Result<DimensionReport> {
    let slopes: Vec<f64> = rates.iter().map(|r| r.slope).collect();
    let mut rep = ratio_report(&slopes, ladder)?;
    rep.residual_max = rates.iter().map(|r| r.residual_max).fold(0.0, f64::max);
    rep.fits = rates.to_vec();
    Ok(rep)
}

/// Dimension report from plain per-scale rates (for example `ln N(eps)` for box dimension).
pub fn ratio_report(rates: &[f64], ladder: &[f64]) -> Result<DimensionReport> {
    if ladder.len() < 3 {
        return Err(Error::Degenerate("ladder needs at least 3 scales".into()));
    }
    if rates.len() != ladder.len() {
        return Err(Error::Degenerate(format!(
            "{} rates for {} scales",
            rates.len(),
            ladder.len()
        )));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Degenerate("ladder must be strictly decreasing".into()));
    }
    if ladder.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Degenerate("ladder scales must lie in (0, 1)".into()));
    }
    let ratios: Vec<f64> = rates.iter().zip(ladder).map(|(r, e)| r / (1.0 / e).ln()).collect();
    let tail = ladder.len().div_ceil(2);
    let finest = &ratios[ratios.len() - tail..];
    Ok(DimensionReport {
        ladder: ladder.to_vec(),
        rates: rates.to_vec(),
        tail,
        ratio_upper: finest.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ratio_lower: finest.iter().copied().fold(f64::INFINITY, f64::min),
        ratios,
        fits: Vec::new(),
        residual_max: 0.0,
    })
}
