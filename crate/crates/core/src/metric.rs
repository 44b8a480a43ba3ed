//! Finite metric spaces, metric alphabets, the weighted product metric on
//! sequence spaces and its Bowen lift.
//!
//! A point of the sequence space is represented by a finite [`Word`] that
//! carries its own index range. For a system with window half-width `W`, the
//! distance at time `t` is
//!
//! ```text
//! d_t(x, y) = sum_{|k| <= W} 2^{-|k|} |x_{t+k} - y_{t+k}|
//! ```
//!
//! which differs from the untruncated series by at most `2^{1-W} diam(A)`.
//! The Bowen lift `d_n` is the maximum of `d_t` over `0 <= t < n`.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::budget::Budget;
use crate::systems::{enumerate_states, Enumeration, SymbolicSystem};

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

pub(crate) fn fresh_id() -> u64 {
    NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed)
}

/// Tolerance for the spot-checked triangle inequality.
pub const TRIANGLE_TOL: f64 = 1e-12;

/// Finite subset of `[0, 1]` with the absolute-difference metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricAlphabet {
    values: Vec<f64>,
    diam: f64,
    dyadic: bool,
}

impl MetricAlphabet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("alphabet must be nonempty");
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return invalid("alphabet values must lie in [0, 1]");
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("alphabet values must be strictly increasing");
        }
        if values.len() > u16::MAX as usize {
            return invalid("alphabet too large");
        }
        let diam = values[values.len() - 1] - values[0];
        let dyadic = values.iter().all(|&v| is_dyadic(v, 32));
        Ok(MetricAlphabet {
            values,
            diam,
            dyadic,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, letter: u16) -> f64 {
        self.values[letter as usize]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Every value is `k / 2^j` with `j <= 32`, so sums of weighted
    /// differences at dyadic scales are exact in double precision.
    pub fn is_dyadic(&self) -> bool {
        self.dyadic
    }

    /// Smallest gap between consecutive values (`+inf` for one letter).
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Letter whose value equals `v` exactly.
    pub fn letter_of(&self, v: f64) -> Option<u16> {
        self.values.iter().position(|&x| x == v).map(|i| i as u16)
    }
}

pub(crate) fn is_dyadic(v: f64, max_bits: i32) -> bool {
    let scaled = v * 2f64.powi(max_bits);
    scaled.fract() == 0.0
}

/// Window half-width together with the mass of the discarded weight tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub half_width: usize,
    pub tail_bound: f64,
}

impl TruncationSpec {
    pub fn new(half_width: usize, diam: f64) -> Self {
        TruncationSpec {
            half_width,
            tail_bound: tail_bound(half_width, diam),
        }
    }

    /// Sum of the kept weights, `sum_{|k| <= W} 2^{-|k|} = 3 - 2^{1-W}`.
    pub fn weight_sum(&self) -> f64 {
        3.0 - 2f64.powi(1 - self.half_width as i32)
    }
}

/// `sum_{|k| > W} 2^{-|k|} diam = 2^{1-W} diam`.
pub fn tail_bound(half_width: usize, diam: f64) -> f64 {
    2f64.powi(1 - half_width as i32) * diam
}

/// Smallest `W >= 0` whose discarded tail is at most `tol`.
pub fn truncation_window(tol: f64, diam: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    if diam < 0.0 || !diam.is_finite() {
        return invalid(format!("diameter must be finite and nonnegative, got {diam}"));
    }
    let mut w = 0usize;
    while tail_bound(w, diam) > tol {
        w += 1;
    }
    Ok(w)
}

/// Finite word over an alphabet, carrying its index range `[first, first + len)`.
///
/// Shifting re-indexes the same letters; nothing is mutated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    first: i64,
    letters: Vec<u16>,
}

impl Word {
    pub fn new(first: i64, letters: Vec<u16>) -> Self {
        Word { first, letters }
    }

    /// Word over `[-W, n - 1 + W]`.
    pub fn centered(half_width: usize, letters: Vec<u16>) -> Self {
        Word::new(-(half_width as i64), letters)
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    /// Last index covered (inclusive).
    pub fn last(&self) -> i64 {
        self.first + self.letters.len() as i64 - 1
    }

    pub fn letters(&self) -> &[u16] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    #[inline]
    pub fn at(&self, index: i64) -> Option<u16> {
        let off = index - self.first;
        if off < 0 {
            return None;
        }
        self.letters.get(off as usize).copied()
    }

    /// `sigma^k` applied to the word: index `i` of the result is index `i + k`
    /// of `self`.
    pub fn shifted(&self, k: i64) -> Word {
        Word {
            first: self.first - k,
            letters: self.letters.clone(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] == w[1])
    }
}

fn check_same_range(x: &Word, y: &Word) -> Result<()> {
    if x.first != y.first || x.len() != y.len() {
        return Err(Error::IndexRange(format!(
            "[{}, {}] vs [{}, {}]",
            x.first,
            x.last(),
            y.first,
            y.last()
        )));
    }
    Ok(())
}

/// Truncated distance at time `t`: weighted differences over `[t - W, t + W]`.
pub fn window_distance(
    alphabet: &MetricAlphabet,
    half_width: usize,
    x: &Word,
    y: &Word,
    t: i64,
) -> Result<f64> {
    check_same_range(x, y)?;
    let w = half_width as i64;
    if t - w < x.first || t + w > x.last() {
        return Err(Error::IndexRange(format!(
            "window [{}, {}] not covered by [{}, {}]",
            t - w,
            t + w,
            x.first,
            x.last()
        )));
    }
    Ok(window_distance_unchecked(alphabet, half_width, x, y, t))
}

#[inline]
fn window_distance_unchecked(
    alphabet: &MetricAlphabet,
    half_width: usize,
    x: &Word,
    y: &Word,
    t: i64,
) -> f64 {
    let base = (t - x.first) as usize;
    let xs = &x.letters;
    let ys = &y.letters;
    let mut acc = (alphabet.value(xs[base]) - alphabet.value(ys[base])).abs();
    let mut weight = 1.0;
    for k in 1..=half_width {
        weight *= 0.5;
        let l = base - k;
        let r = base + k;
        acc += weight * (alphabet.value(xs[l]) - alphabet.value(ys[l])).abs();
        acc += weight * (alphabet.value(xs[r]) - alphabet.value(ys[r])).abs();
    }
    acc
}

/// Distance at time 0 under the system's truncation.
pub fn pairwise_distance(sys: &SymbolicSystem, x: &Word, y: &Word) -> Result<f64> {
    window_distance(sys.alphabet(), sys.half_width(), x, y, 0)
}

/// Bowen distance `d_n(x, y) = max_{0 <= j < n} d_j(x, y)`.
pub fn bowen_distance(sys: &SymbolicSystem, x: &Word, y: &Word, n: usize) -> Result<f64> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    check_same_range(x, y)?;
    let w = sys.half_width() as i64;
    if x.first > -w || x.last() < n as i64 - 1 + w {
        return Err(Error::IndexRange(format!(
            "word [{}, {}] does not cover [{}, {}]",
            x.first,
            x.last(),
            -w,
            n as i64 - 1 + w
        )));
    }
    Ok(bowen_distance_unchecked(sys.alphabet(), sys.half_width(), x, y, n))
}

#[inline]
pub(crate) fn bowen_distance_unchecked(
    alphabet: &MetricAlphabet,
    half_width: usize,
    x: &Word,
    y: &Word,
    n: usize,
) -> f64 {
    (0..n as i64)
        .map(|t| window_distance_unchecked(alphabet, half_width, x, y, t))
        .fold(0.0, f64::max)
}

/// Where a space's distance came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Raw,
    BowenLift { base_id: u64, n: usize },
}

/// Opaque payload attached to each point index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Index(usize),
    Real(f64),
    Plane([f64; 2]),
    Word(Word),
}

/// Indexed point set with a dense, precomputed distance matrix.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    id: u64,
    points: Vec<Point>,
    dist: Vec<f64>,
    diam: f64,
    provenance: Provenance,
}

impl FiniteMetricSpace {
    /// Build from a distance oracle evaluated on every unordered pair.
    pub fn from_fn<F>(points: Vec<Point>, provenance: Provenance, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let p = points.len();
        if p == 0 {
            return invalid("a metric space needs at least one point");
        }
        let mut dist = vec![0.0; p * p];
        dist.par_chunks_mut(p).enumerate().for_each(|(i, row)| {
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j {
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    *cell = f(a, b);
                }
            }
        });
        if let Some(bad) = dist.iter().find(|d| !d.is_finite() || **d < 0.0) {
            return invalid(format!("distance oracle returned {bad}"));
        }
        let diam = dist.iter().copied().fold(0.0, f64::max);
        Ok(FiniteMetricSpace {
            id: fresh_id(),
            points,
            dist,
            diam,
            provenance,
        })
    }

    /// Build from an explicit row-major matrix; must be symmetric with zero diagonal.
    pub fn from_matrix(points: Vec<Point>, dist: Vec<f64>) -> Result<Self> {
        let p = points.len();
        if p == 0 || dist.len() != p * p {
            return invalid("matrix size does not match point count");
        }
        for i in 0..p {
            if dist[i * p + i] != 0.0 {
                return invalid(format!("dist({i}, {i}) is not zero"));
            }
            for j in 0..i {
                if dist[i * p + j] != dist[j * p + i] {
                    return invalid(format!("dist({i}, {j}) is not symmetric"));
                }
            }
        }
        FiniteMetricSpace::from_fn(points, Provenance::Raw, |i, j| dist[i * p + j])
    }

    /// Points on the real line.
    pub fn line(values: &[f64]) -> Result<Self> {
        let pts = values.iter().map(|&v| Point::Real(v)).collect();
        FiniteMetricSpace::from_fn(pts, Provenance::Raw, |i, j| (values[i] - values[j]).abs())
    }

    /// Points in the plane with the Euclidean metric.
    pub fn plane(coords: &[[f64; 2]]) -> Result<Self> {
        let pts = coords.iter().map(|&c| Point::Plane(c)).collect();
        FiniteMetricSpace::from_fn(pts, Provenance::Raw, |i, j| {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            dx.hypot(dy)
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.points.len() + j]
    }

    /// Distances from `i` to every point.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.points.len();
        &self.dist[i * p..(i + 1) * p]
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Sorted distinct pairwise distances, including 0.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut d: Vec<f64> = self.dist.clone();
        d.sort_by(f64::total_cmp);
        d.dedup();
        d
    }

    /// Spot-check the triangle inequality on `samples` random triples.
    /// Returns the worst violation `d(i,k) - d(i,j) - d(j,k)` seen (<= 0 if none).
    pub fn triangle_defect<R: Rng>(&self, samples: usize, rng: &mut R) -> f64 {
        let p = self.len();
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..samples {
            let (i, j, k) = (
                rng.random_range(0..p),
                rng.random_range(0..p),
                rng.random_range(0..p),
            );
            worst = worst.max(self.dist(i, k) - self.dist(i, j) - self.dist(j, k));
        }
        worst
    }
}

/// Space `(states, d_n)` for words covering `[-W, n - 1 + W]`.
pub fn bowen_lift(sys: &SymbolicSystem, states: &[Word], n: usize) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let w = sys.half_width() as i64;
    let Some(first) = states.first() else {
        return invalid("no states to lift");
    };
    for s in states {
        check_same_range(first, s)?;
    }
    if first.first > -w || first.last() < n as i64 - 1 + w {
        return Err(Error::IndexRange(format!(
            "words over [{}, {}] do not cover [{}, {}]",
            first.first,
            first.last(),
            -w,
            n as i64 - 1 + w
        )));
    }
    let alphabet = sys.alphabet();
    let hw = sys.half_width();
    let points = states.iter().cloned().map(Point::Word).collect();
    FiniteMetricSpace::from_fn(
        points,
        Provenance::BowenLift {
            base_id: sys.id(),
            n,
        },
        |i, j| bowen_distance_unchecked(alphabet, hw, &states[i], &states[j], n),
    )
}

/// Bowen lift of every admissible word of the system at time horizon `n`.
pub fn exhaustive_lift(sys: &SymbolicSystem, n: usize, budget: &Budget) -> Result<FiniteMetricSpace> {
    let states = enumerate_states(sys, n, &Enumeration::Exhaustive, budget)?;
    bowen_lift(sys, &states, n)
}
