//! Example systems as symbolic generators: full shifts over grid and
//! reciprocal alphabets, and the block-union subshift built from grids
//! `J_k` of spacing `eps_k = (a_k - a_{k-1}) / b_k` together with the fixed
//! point `1^Z`.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::metric::{fresh_id, MetricAlphabet, TruncationSpec, Word};

/// Parameters of the block construction, truncated to `K` blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockParams {
    /// `a_0 = 0 < a_1 < ... < a_K`.
    pub a: Vec<f64>,
    /// `b_1 < b_2 < ... < b_K`.
    pub b: Vec<u64>,
    /// `eps_k = (a_k - a_{k-1}) / b_k`, indexed from block 1 at position 0.
    pub eps: Vec<f64>,
    /// `J_k = { a_{k-1} + j eps_k : 0 <= j < b_k }`.
    pub grids: Vec<Vec<f64>>,
}

impl BlockParams {
    pub fn new(a: Vec<f64>, b: Vec<u64>) -> Result<Self> {
        let k = b.len();
        if k == 0 {
            return invalid("need at least one block");
        }
        if a.len() != k + 1 {
            return invalid(format!("expected {} values of a (a_0..a_K), got {}", k + 1, a.len()));
        }
        if a[0] != 0.0 {
            return Err(Error::Constraint("(C1) requires a_0 = 0".into()));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Constraint("(C1) requires a strictly increasing".into()));
        }
        if a[k] >= 1.0 {
            return Err(Error::Constraint("(C1) requires a_k < 1 on the prefix".into()));
        }
        let gaps: Vec<f64> = a.windows(2).map(|w| w[1] - w[0]).collect();
        if gaps.windows(2).any(|g| g[1] > g[0]) {
            return Err(Error::Constraint("(C2) requires a_k - a_{k-1} to decrease".into()));
        }
        if b[0] == 0 || b.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Constraint("(C3) requires b positive and strictly increasing".into()));
        }
        if b.iter().sum::<u64>() >= u16::MAX as u64 {
            return invalid("blocks too large for the letter encoding");
        }
        let eps: Vec<f64> = gaps.iter().zip(&b).map(|(g, &bk)| g / bk as f64).collect();
        let grids = (0..k)
            .map(|i| (0..b[i]).map(|j| a[i] + j as f64 * eps[i]).collect())
            .collect();
        Ok(BlockParams { a, b, eps, grids })
    }

    /// `a_k = sum_{n<=k} 6 / (pi n)^2`, `b_k = 3^k`.
    pub fn standard(k: usize) -> Result<Self> {
        let mut a = vec![0.0];
        let mut acc = 0.0;
        for n in 1..=k {
            acc += 6.0 / (std::f64::consts::PI * n as f64).powi(2);
            a.push(acc);
        }
        let b = (1..=k as u32).map(|n| 3u64.pow(n)).collect();
        BlockParams::new(a, b)
    }

    pub fn blocks(&self) -> usize {
        self.b.len()
    }

    /// Topological entropy of the shift on `X_k = J_k^Z` (1-based `k`).
    pub fn block_entropy(&self, k: usize) -> f64 {
        (self.b[k - 1] as f64).ln()
    }
}

/// How a system restricts admissible words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Constraint {
    FullShift,
    /// Words stay inside one `J_k` or are the constant fixed-point word.
    BlockUnion {
        params: BlockParams,
        /// Letter indices of each `J_k`.
        blocks: Vec<Vec<u16>>,
        /// Letter of the value 1, if the fixed point is included.
        fixed_point: Option<u16>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamRule<T> {
    PaperDefault,
    Explicit(T),
}

/// Alphabet, truncation window and admissibility constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSystem {
    id: u64,
    alphabet: MetricAlphabet,
    truncation: TruncationSpec,
    constraint: Constraint,
}

impl SymbolicSystem {
    pub fn full_shift(alphabet: MetricAlphabet, half_width: usize) -> Self {
        let truncation = TruncationSpec::new(half_width, alphabet.diam());
        SymbolicSystem {
            id: fresh_id(),
            alphabet,
            truncation,
            constraint: Constraint::FullShift,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn alphabet(&self) -> &MetricAlphabet {
        &self.alphabet
    }

    pub fn half_width(&self) -> usize {
        self.truncation.half_width
    }

    pub fn truncation(&self) -> &TruncationSpec {
        &self.truncation
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn block_params(&self) -> Option<&BlockParams> {
        match &self.constraint {
            Constraint::BlockUnion { params, .. } => Some(params),
            Constraint::FullShift => None,
        }
    }

    /// Number of letters in a word covering `[-W, n - 1 + W]`.
    pub fn word_len(&self, n: usize) -> usize {
        n + 2 * self.half_width()
    }

    /// Block (1-based) containing the letter; 0 for the fixed point.
    pub fn component_of_letter(&self, letter: u16) -> Option<usize> {
        match &self.constraint {
            Constraint::FullShift => None,
            Constraint::BlockUnion {
                blocks, fixed_point, ..
            } => {
                if Some(letter) == *fixed_point {
                    return Some(0);
                }
                blocks.iter().position(|b| b.contains(&letter)).map(|k| k + 1)
            }
        }
    }

    /// Whether the word is admissible under the constraint.
    pub fn admits(&self, word: &Word) -> bool {
        match &self.constraint {
            Constraint::FullShift => word
                .letters()
                .iter()
                .all(|&l| (l as usize) < self.alphabet.len()),
            Constraint::BlockUnion { .. } => {
                let Some(&first) = word.letters().first() else {
                    return true;
                };
                match self.component_of_letter(first) {
                    Some(0) => word.is_constant(),
                    Some(k) => word
                        .letters()
                        .iter()
                        .all(|&l| self.component_of_letter(l) == Some(k)),
                    None => false,
                }
            }
        }
    }

    /// Number of admissible words of length `len`, saturating.
    pub fn count_words(&self, len: usize) -> u128 {
        let pow = |base: u128| -> u128 {
            (0..len).fold(1u128, |acc, _| acc.saturating_mul(base))
        };
        match &self.constraint {
            Constraint::FullShift => pow(self.alphabet.len() as u128),
            Constraint::BlockUnion {
                blocks, fixed_point, ..
            } => {
                let mut total = fixed_point.is_some() as u128;
                for b in blocks {
                    total = total.saturating_add(pow(b.len() as u128));
                }
                total
            }
        }
    }
}

/// Uniform grid `{ i / (m - 1) }` on `[0, 1]` (just `{0}` for `m = 1`).
pub fn make_grid_alphabet(m: usize) -> Result<MetricAlphabet> {
    if m == 0 {
        return invalid("grid needs m >= 1");
    }
    if m == 1 {
        return MetricAlphabet::new(vec![0.0]);
    }
    let step = (m - 1) as f64;
    MetricAlphabet::new((0..m).map(|i| i as f64 / step).collect())
}

/// `{0} U { 1/k : 1 <= k <= n }`, sorted.
pub fn make_reciprocal_alphabet(n: usize) -> Result<MetricAlphabet> {
    if n == 0 {
        return invalid("reciprocal alphabet needs N >= 1");
    }
    let mut values: Vec<f64> = (1..=n).rev().map(|k| 1.0 / k as f64).collect();
    values.insert(0, 0.0);
    MetricAlphabet::new(values)
}

/// Block-union subshift over `J_1, ..., J_K` plus `1^Z`.
pub fn make_block_system(
    k: usize,
    a_rule: ParamRule<&[f64]>,
    b_rule: ParamRule<&[u64]>,
    half_width: usize,
) -> Result<SymbolicSystem> {
    if k == 0 {
        return invalid("need K >= 1");
    }
    let default = BlockParams::standard(k)?;
    let a = match a_rule {
        ParamRule::PaperDefault => default.a.clone(),
        ParamRule::Explicit(a) => a.to_vec(),
    };
    let b = match b_rule {
        ParamRule::PaperDefault => default.b.clone(),
        ParamRule::Explicit(b) => b.to_vec(),
    };
    if b.len() != k {
        return invalid(format!("K = {k} but {} values of b", b.len()));
    }
    let params = BlockParams::new(a, b)?;
    let mut values: Vec<f64> = params.grids.iter().flatten().copied().collect();
    values.push(1.0);
    // Grids sit in disjoint intervals [a_{k-1}, a_k), so this is already sorted.
    let alphabet = MetricAlphabet::new(values)?;
    let mut next = 0u16;
    let blocks = params
        .grids
        .iter()
        .map(|g| {
            let ids: Vec<u16> = (next..next + g.len() as u16).collect();
            next += g.len() as u16;
            ids
        })
        .collect();
    let truncation = TruncationSpec::new(half_width, alphabet.diam());
    Ok(SymbolicSystem {
        id: fresh_id(),
        alphabet,
        truncation,
        constraint: Constraint::BlockUnion {
            params,
            blocks,
            fixed_point: Some(next),
        },
    })
}

/// Distribution over alphabet letters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterDist(pub Vec<f64>);

impl LetterDist {
    pub fn uniform(len: usize) -> Self {
        LetterDist(vec![1.0 / len as f64; len])
    }

    pub fn dirac(len: usize, letter: u16) -> Self {
        let mut w = vec![0.0; len];
        w[letter as usize] = 1.0;
        LetterDist(w)
    }

    pub fn validate(&self, alphabet_len: usize) -> Result<()> {
        if self.0.len() != alphabet_len {
            return invalid(format!(
                "letter distribution has {} entries for {} letters",
                self.0.len(),
                alphabet_len
            ));
        }
        if self.0.iter().any(|p| !(*p >= 0.0)) {
            return invalid("letter probabilities must be nonnegative");
        }
        let s: f64 = self.0.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(s));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Enumeration {
    Exhaustive,
    Sample { count: usize, seed: u64, dist: LetterDist },
}

/// Admissible words over `[-W, n - 1 + W]`, in lexicographic letter order
/// (blocks in order, fixed point last) or sampled deterministically.
pub fn enumerate_states(
    sys: &SymbolicSystem,
    n: usize,
    mode: &Enumeration,
    budget: &Budget,
) -> Result<Vec<Word>> {
    let len = sys.word_len(n);
    let hw = sys.half_width();
    match mode {
        Enumeration::Exhaustive => {
            let total = sys.count_words(len);
            if total > budget.max_states as u128 {
                return Err(Error::BudgetExceeded {
                    what: "enumerated states (use sampling)",
                    limit: budget.max_states as u64,
                });
            }
            let mut out = Vec::with_capacity(total as usize);
            match sys.constraint() {
                Constraint::FullShift => {
                    let letters: Vec<u16> = (0..sys.alphabet().len() as u16).collect();
                    push_products(&letters, len, hw, &mut out);
                }
                Constraint::BlockUnion {
                    blocks, fixed_point, ..
                } => {
                    for b in blocks {
                        push_products(b, len, hw, &mut out);
                    }
                    if let Some(f) = fixed_point {
                        out.push(Word::centered(hw, vec![*f; len]));
                    }
                }
            }
            Ok(out)
        }
        Enumeration::Sample { count, seed, dist } => {
            dist.validate(sys.alphabet().len())?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            match sys.constraint() {
                Constraint::FullShift => {
                    let pick = WeightedIndex::new(&dist.0)
                        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                    Ok((0..*count)
                        .map(|_| {
                            let letters = (0..len).map(|_| pick.sample(&mut rng) as u16).collect();
                            Word::centered(hw, letters)
                        })
                        .collect())
                }
                Constraint::BlockUnion {
                    blocks, fixed_point, ..
                } => {
                    // Component first (by its total letter mass), then letters within it.
                    let mut comps: Vec<Vec<u16>> = blocks.clone();
                    if let Some(f) = fixed_point {
                        comps.push(vec![*f]);
                    }
                    let masses: Vec<f64> = comps
                        .iter()
                        .map(|c| c.iter().map(|&l| dist.0[l as usize]).sum())
                        .collect();
                    let pick_comp = WeightedIndex::new(&masses)
                        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                    let inner: Vec<Option<WeightedIndex<f64>>> = comps
                        .iter()
                        .map(|c| WeightedIndex::new(c.iter().map(|&l| dist.0[l as usize])).ok())
                        .collect();
                    Ok((0..*count)
                        .map(|_| {
                            let ci = pick_comp.sample(&mut rng);
                            let comp = &comps[ci];
                            let pick = inner[ci].as_ref().expect("component has positive mass");
                            let letters =
                                (0..len).map(|_| comp[pick.sample(&mut rng)]).collect();
                            Word::centered(hw, letters)
                        })
                        .collect())
                }
            }
        }
    }
}

fn push_products(letters: &[u16], len: usize, hw: usize, out: &mut Vec<Word>) {
    if letters.is_empty() {
        return;
    }
    let mut idx = vec![0usize; len];
    loop {
        out.push(Word::centered(hw, idx.iter().map(|&i| letters[i]).collect()));
        // odometer, last coordinate fastest
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < letters.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_alphabets() {
        assert_eq!(make_grid_alphabet(2).unwrap().values(), &[0.0, 1.0]);
        assert_eq!(make_grid_alphabet(3).unwrap().values(), &[0.0, 0.5, 1.0]);
        let one = make_grid_alphabet(1).unwrap();
        assert_eq!(one.values(), &[0.0]);
        assert_eq!(one.diam(), 0.0);
        assert!(make_grid_alphabet(0).is_err());
    }

    #[test]
    fn reciprocal_alphabets() {
        assert_eq!(
            make_reciprocal_alphabet(3).unwrap().values(),
            &[0.0, 1.0 / 3.0, 0.5, 1.0]
        );
        assert_eq!(make_reciprocal_alphabet(1).unwrap().values(), &[0.0, 1.0]);
        let a = make_reciprocal_alphabet(400).unwrap();
        assert_eq!(a.len(), 401);
        // 1/401 is not a letter; the closest pair is 1/399, 1/400
        let expect = 1.0 / (399.0 * 400.0);
        assert!((a.min_gap() - expect).abs() < 1e-15);
    }

    #[test]
    fn block_default_k1() {
        let sys =
            make_block_system(1, ParamRule::PaperDefault, ParamRule::PaperDefault, 0).unwrap();
        let p = sys.block_params().unwrap();
        let a1 = 6.0 / std::f64::consts::PI.powi(2);
        assert_eq!(p.b, vec![3]);
        assert!((p.a[1] - a1).abs() < 1e-15);
        assert!((p.eps[0] - a1 / 3.0).abs() < 1e-15);
        assert_eq!(p.grids[0].len(), 3);
        assert!((p.grids[0][2] - 2.0 * a1 / 3.0).abs() < 1e-15);
        assert!((p.block_entropy(1) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn block_default_normalizes() {
        let p = BlockParams::standard(6).unwrap();
        assert!(p.a[6] < 1.0);
        // partial sums of 6/(pi n)^2 approach 1
        let mut acc = 0.0;
        for n in 1..=100_000 {
            acc += 6.0 / (std::f64::consts::PI * n as f64).powi(2);
        }
        assert!((acc - 1.0).abs() < 1e-4);
    }

    #[test]
    fn block_explicit() {
        let sys = make_block_system(
            1,
            ParamRule::Explicit(&[0.0, 0.5]),
            ParamRule::Explicit(&[2]),
            0,
        )
        .unwrap();
        let p = sys.block_params().unwrap();
        assert_eq!(p.eps, vec![0.25]);
        assert_eq!(p.grids[0], vec![0.0, 0.25]);
        assert_eq!(sys.alphabet().values(), &[0.0, 0.25, 1.0]);
    }

    #[test]
    fn block_constraint_violations() {
        assert!(matches!(
            BlockParams::new(vec![0.0, 0.5, 0.4], vec![2, 3]),
            Err(Error::Constraint(_))
        ));
        assert!(matches!(
            BlockParams::new(vec![0.0, 0.1, 0.5], vec![2, 3]),
            Err(Error::Constraint(_))
        ));
        assert!(matches!(
            BlockParams::new(vec![0.0, 0.5, 0.7], vec![3, 3]),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn block_invariants() {
        let sys =
            make_block_system(3, ParamRule::PaperDefault, ParamRule::PaperDefault, 0).unwrap();
        let p = sys.block_params().unwrap();
        for (k, g) in p.grids.iter().enumerate() {
            for w in g.windows(2) {
                assert!(((w[1] - w[0]) - p.eps[k]).abs() < 1e-15);
            }
        }
        for i in 0..p.grids.len() {
            for j in 0..p.grids.len() {
                if i == j {
                    continue;
                }
                let gap = p.grids[i]
                    .iter()
                    .flat_map(|x| p.grids[j].iter().map(move |y| (x - y).abs()))
                    .fold(f64::INFINITY, f64::min);
                assert!(gap > 0.0);
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let full = SymbolicSystem::full_shift(make_grid_alphabet(2).unwrap(), 0);
        let words = enumerate_states(&full, 2, &Enumeration::Exhaustive, &Budget::default()).unwrap();
        assert_eq!(words.len(), 4);

        let blocks = make_block_system(
            2,
            ParamRule::Explicit(&[0.0, 0.5, 0.75]),
            ParamRule::Explicit(&[2, 3]),
            0,
        )
        .unwrap();
        let words =
            enumerate_states(&blocks, 1, &Enumeration::Exhaustive, &Budget::default()).unwrap();
        assert_eq!(words.len(), 6);
        assert!(words.iter().all(|w| blocks.admits(w)));
    }

    #[test]
    fn enumeration_budget() {
        let full = SymbolicSystem::full_shift(make_grid_alphabet(4).unwrap(), 2);
        let tight = Budget {
            max_states: 100,
            ..Budget::default()
        };
        assert!(matches!(
            enumerate_states(&full, 3, &Enumeration::Exhaustive, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let full = SymbolicSystem::full_shift(make_grid_alphabet(3).unwrap(), 1);
        let mode = Enumeration::Sample {
            count: 100,
            seed: 7,
            dist: LetterDist::uniform(3),
        };
        let a = enumerate_states(&full, 4, &mode, &Budget::default()).unwrap();
        let b = enumerate_states(&full, 4, &mode, &Budget::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);

        let blocks =
            make_block_system(2, ParamRule::PaperDefault, ParamRule::PaperDefault, 0).unwrap();
        let mode = Enumeration::Sample {
            count: 50,
            seed: 7,
            dist: LetterDist::uniform(blocks.alphabet().len()),
        };
        let s = enumerate_states(&blocks, 3, &mode, &Budget::default()).unwrap();
        assert!(s.iter().all(|w| blocks.admits(w)));
    }

    #[test]
    fn shift_preserves_admissibility() {
        let blocks =
            make_block_system(2, ParamRule::PaperDefault, ParamRule::PaperDefault, 1).unwrap();
        let words =
            enumerate_states(&blocks, 2, &Enumeration::Exhaustive, &Budget::default()).unwrap();
        for w in &words {
            let s = w.shifted(1);
            assert!(blocks.admits(&s));
        }
    }
}
