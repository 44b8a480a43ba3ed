//! Random instances for the suites. Everything is drawn from the trial's own
//! stream and echoed into the counterexample description.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde_json::{json, Value};

use crate::error::Result;
use crate::measures::FiniteMeasure;
use crate::metric::{FiniteMetricSpace, MetricAlphabet};
use crate::systems::{LetterDist, SymbolicSystem};

/// Resolution of dyadic weights.
pub const DYADIC_BITS: i32 = 20;

/// Uniform points in the unit square with the Euclidean metric.
pub fn plane(rng: &mut ChaCha8Rng, min: usize, max: usize) -> Result<(FiniteMetricSpace, Value)> {
    let p = rng.random_range(min..=max);
    let coords: Vec<[f64; 2]> = (0..p).map(|_| [rng.random(), rng.random()]).collect();
    Ok((FiniteMetricSpace::plane(&coords)?, json!({ "plane": coords })))
}

/// Flat Dirichlet weights: normalized standard exponentials.
pub fn flat_dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // land the sum on 1 exactly enough for the measure constructors
    let drift = 1.0 - w.iter().sum::<f64>();
    let top = argmax(&w);
    w[top] += drift;
    w
}

/// Positive multiples of `2^-20` summing to exactly 1.
pub fn dyadic_dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let unit = (1u64 << DYADIC_BITS) as f64;
    let mut ticks: Vec<i64> = flat_dirichlet(rng, k)
        .iter()
        .map(|w| ((w * unit).round() as i64).max(1))
        .collect();
    let top = argmax_i(&ticks);
    ticks[top] += (1i64 << DYADIC_BITS) - ticks.iter().sum::<i64>();
    ticks.iter().map(|&t| t as f64 / unit).collect()
}

fn argmax(w: &[f64]) -> usize {
    (0..w.len()).fold(0, |b, i| if w[i] > w[b] { i } else { b })
}

fn argmax_i(w: &[i64]) -> usize {
    (0..w.len()).fold(0, |b, i| if w[i] > w[b] { i } else { b })
}

/// Measure on a random support of at most `max_support` points.
pub fn measure(
    rng: &mut ChaCha8Rng,
    space: &FiniteMetricSpace,
    max_support: usize,
    dyadic: bool,
) -> Result<FiniteMeasure> {
    let p = space.len();
    let k = rng.random_range(1..=max_support.min(p));
    let mut support = sample(rng, p, k).into_vec();
    support.sort_unstable();
    let w = if dyadic {
        dyadic_dirichlet(rng, k)
    } else {
        flat_dirichlet(rng, k)
    };
    let mut weights = vec![0.0; p];
    for (i, x) in support.into_iter().zip(w) {
        weights[i] = x;
    }
    FiniteMeasure::new(space, weights)
}

/// `len` distinct values among the multiples of 1/8 in `[0, 1]`, sorted.
pub fn dyadic_alphabet(rng: &mut ChaCha8Rng, len: usize) -> Result<MetricAlphabet> {
    let mut picks = sample(rng, 9, len).into_vec();
    picks.sort_unstable();
    MetricAlphabet::new(picks.into_iter().map(|k| k as f64 / 8.0).collect())
}

/// Full shift over a random dyadic alphabet of 1..=`max_letters` letters.
pub fn small_shift(
    rng: &mut ChaCha8Rng,
    max_letters: usize,
    half_width: usize,
) -> Result<(SymbolicSystem, Value)> {
    let len = rng.random_range(1..=max_letters);
    let alphabet = dyadic_alphabet(rng, len)?;
    let desc = json!({ "alphabet": alphabet.values(), "half_width": half_width });
    Ok((SymbolicSystem::full_shift(alphabet, half_width), desc))
}

/// Letter distribution with full support (dyadic masses).
pub fn letter_dist(rng: &mut ChaCha8Rng, len: usize) -> LetterDist {
    LetterDist(dyadic_dirichlet(rng, len))
}

/// A multiple of 1/32 in `[lo, hi]` (both multiples of 1/32).
pub fn dyadic_eps(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let a = (lo * 32.0).round() as u32;
    let b = (hi * 32.0).round() as u32;
    rng.random_range(a..=b) as f64 / 32.0
}
