//! Exact shift-invariant Gibbs measures in dimension one, backed by a
//! weighted transfer matrix.
//!
//! The subshift and the finite-range potential are recoded to a
//! nearest-neighbor presentation on blocks of length `m` (the higher-block
//! coding), with `m` large enough to hold both the forbidden words and the
//! potential's dependence window. Each allowed block transition carries the
//! Boltzmann weight of one lattice site, so walks of the chain accumulate
//! every site's contribution exactly once. Perron eigendata of the weighted
//! matrix then give closed-form stationary cylinder probabilities: the
//! unique Gibbs measure of the recoded chain, primitive matrix required.

use std::collections::BTreeMap;

use crate::lattice::{site1, Coord, FiniteRegion};
use crate::potential::Potential;
use crate::subshift::{Pattern, SftSpec, SymbolSource};
use crate::{Error, Result};

/// Exact cylinder oracle for the d=1 Gibbs measure of a finite-range
/// potential on a primitive SFT.
#[derive(Clone, Debug)]
pub struct TransferMatrixOracle {
    alphabet_len: usize,
    block_len: usize,
    blocks: Vec<Vec<u8>>,
    block_index: BTreeMap<Vec<u8>, usize>,
    weights: Vec<Vec<f64>>,
    perron_value: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    enumeration_cap: u64,
}

struct WordView<'a> {
    word: &'a [u8],
    zero_at: usize,
}

impl<'a> SymbolSource for WordView<'a> {
    fn dim(&self) -> usize {
        1
    }

    fn at(&self, coords: &[Coord]) -> u8 {
        let idx = self.zero_at as Coord + coords[0];
        self.word[idx as usize]
    }
}

/// Expand forbidden patterns on a (possibly gapped) shape into the complete
/// list of forbidden contiguous words over the shape's hull.
fn forbidden_words(spec: &SftSpec) -> (usize, Vec<Vec<u8>>) {
    if spec.forbidden().is_empty() {
        return (1, Vec::new());
    }
    let (lo, hi) = spec.shape().hull().expect("nonempty shape");
    let len = (hi[0] - lo[0] + 1) as usize;
    let positions: Vec<Option<usize>> = (0..len)
        .map(|k| spec.shape().position(&site1(lo[0] + k as Coord)))
        .collect();
    let mut words = Vec::new();
    for f in spec.forbidden() {
        let mut partial: Vec<Vec<u8>> = vec![Vec::new()];
        for p in &positions {
            let mut next = Vec::new();
            for w in &partial {
                match p {
                    Some(i) => {
                        let mut v = w.clone();
                        v.push(f.values()[*i]);
                        next.push(v);
                    }
                    None => {
                        for a in 0..spec.alphabet.len() as u8 {
                            let mut v = w.clone();
                            v.push(a);
                            next.push(v);
                        }
                    }
                }
            }
            partial = next;
        }
        words.extend(partial);
    }
    words.sort();
    words.dedup();
    (len, words)
}

fn contains_forbidden(word: &[u8], forbidden: &[Vec<u8>], flen: usize) -> bool {
    if forbidden.is_empty() || word.len() < flen {
        return false;
    }
    word.windows(flen).any(|w| forbidden.iter().any(|f| f == w))
}

/// Builds the exact Gibbs measure oracle for a d=1 SFT and finite-range
/// potential. Fails when the recoded adjacency is not primitive.
pub fn transfer_gibbs_1d(spec: &SftSpec, f: &Potential) -> Result<TransferMatrixOracle> {
    if spec.dim() != 1 || f.dim() != 1 {
        return Err(Error::DimensionMismatch(1, spec.dim().max(f.dim())));
    }
    let window = f.window().ok_or_else(|| {
        Error::Model("transfer oracle needs a finite-range potential".into())
    })?;
    let (flen, forbidden) = forbidden_words(spec);
    let (wlo, whi) = match window.hull() {
        Some((lo, hi)) => (lo[0].min(0), hi[0].max(0)),
        None => (0, 0),
    };
    let span = (whi - wlo) as usize;
    let block_len = flen.saturating_sub(1).max(span).max(1);

    // Locally admissible blocks of length m.
    let mut blocks = Vec::new();
    let mut word = vec![0u8; block_len];
    let a = spec.alphabet.len() as u8;
    'outer: loop {
        if !contains_forbidden(&word, &forbidden, flen) {
            blocks.push(word.clone());
        }
        let mut k = block_len;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            word[k] += 1;
            if word[k] < a {
                break;
            }
            word[k] = 0;
        }
    }
    if blocks.is_empty() {
        return Err(Error::NonPrimitive("no admissible blocks".into()));
    }
    let block_index: BTreeMap<Vec<u8>, usize> =
        blocks.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();

    // Transition log-weights: one site's potential value per step.
    let n = blocks.len();
    let zero_at = (-wlo) as usize;
    let mut log_w = vec![vec![f64::NEG_INFINITY; n]; n];
    let mut any = false;
    let mut combined = vec![0u8; block_len + 1];
    for (i, u) in blocks.iter().enumerate() {
        for (j, v) in blocks.iter().enumerate() {
            if u[1..] != v[..block_len - 1] {
                continue;
            }
            combined[..block_len].copy_from_slice(u);
            combined[block_len] = v[block_len - 1];
            if contains_forbidden(&combined, &forbidden, flen) {
                continue;
            }
            let view = WordView { word: &combined, zero_at };
            log_w[i][j] = f.value_at(&view, &site1(0))?;
            any = true;
        }
    }
    if !any {
        return Err(Error::NonPrimitive("no admissible transitions".into()));
    }
    let gmax = log_w
        .iter()
        .flatten()
        .copied()
        .filter(|x| x.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<Vec<f64>> = log_w
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| if x.is_finite() { (x - gmax).exp() } else { 0.0 })
                .collect()
        })
        .collect();

    check_primitive(&weights)?;

    let (perron_value, right) = perron_vector(&weights)?;
    let transposed: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| weights[j][i]).collect())
        .collect();
    let (_, mut left) = perron_vector(&transposed)?;
    // Normalize so Σ uᵢ vᵢ = 1: the stationary block distribution.
    let dot: f64 = left.iter().zip(&right).map(|(u, v)| u * v).sum();
    for u in &mut left {
        *u /= dot;
    }

    Ok(TransferMatrixOracle {
        alphabet_len: spec.alphabet.len(),
        block_len,
        blocks,
        block_index,
        weights,
        perron_value,
        left,
        right,
        enumeration_cap: spec.enumeration_cap,
    })
}

fn check_primitive(w: &[Vec<f64>]) -> Result<()> {
    let n = w.len();
    let adj: Vec<Vec<bool>> = w
        .iter()
        .map(|row| row.iter().map(|&x| x > 0.0).collect())
        .collect();
    // Strong connectivity via forward and backward reachability from 0.
    let reach = |transpose: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let edge = if transpose { adj[v][u] } else { adj[u][v] };
                if edge && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    let fwd = reach(false);
    let bwd = reach(true);
    if fwd.iter().any(|&s| !s) || bwd.iter().any(|&s| !s) {
        return Err(Error::NonPrimitive("block graph is not strongly connected".into()));
    }
    // Period: gcd over edges of dist(u)+1−dist(v) along a BFS from 0.
    let mut dist = vec![i64::MIN; n];
    dist[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if adj[u][v] && dist[v] == i64::MIN {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g: i64 = 0;
    for u in 0..n {
        for v in 0..n {
            if adj[u][v] {
                g = gcd64(g, (dist[u] + 1 - dist[v]).abs());
            }
        }
    }
    if g != 1 {
        return Err(Error::NonPrimitive(format!("block graph has period {g}")));
    }
    Ok(())
}

fn gcd64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd64(b, a % b)
    }
}

/// Dominant eigenvalue and positive eigenvector by power iteration; the
/// matrix is primitive, so convergence is geometric.
fn perron_vector(w: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let n = w.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for _ in 0..1_000_000 {
        let mut next = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += w[i][j] * v[j];
            }
            next[i] = s;
        }
        let total: f64 = next.iter().sum();
        if total <= 0.0 {
            return Err(Error::NonPrimitive("power iteration collapsed".into()));
        }
        for x in &mut next {
            *x /= total;
        }
        let delta: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = next;
        lambda = total;
        if delta < 1e-16 {
            break;
        }
    }
    Ok((lambda, v))
}

impl TransferMatrixOracle {
    pub fn perron_value(&self) -> f64 {
        self.perron_value
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Stationary probability of a contiguous word (position-independent).
    pub fn word_prob(&self, word: &[u8]) -> f64 {
        if word.iter().any(|&v| v as usize >= self.alphabet_len) {
            return 0.0;
        }
        let m = self.block_len;
        if word.len() < m {
            // Sum of block marginals over completions.
            return self
                .blocks
                .iter()
                .enumerate()
                .filter(|(_, b)| &b[..word.len()] == word)
                .map(|(i, _)| self.left[i] * self.right[i])
                .sum();
        }
        let first = match self.block_index.get(&word[..m]) {
            Some(&i) => i,
            None => return 0.0,
        };
        let mut p = self.left[first] * self.right[first];
        let mut prev = first;
        for t in 1..=word.len() - m {
            let next = match self.block_index.get(&word[t..t + m]) {
                Some(&i) => i,
                None => return 0.0,
            };
            p *= self.weights[prev][next] * self.right[next]
                / (self.perron_value * self.right[prev]);
            prev = next;
        }
        p
    }

    /// `μ([ω])` for a pattern on any finite region: gaps in the hull are
    /// summed out.
    pub fn cylinder_prob(&self, pattern: &Pattern) -> Result<f64> {
        if pattern.region().dim() != 1 {
            return Err(Error::DimensionMismatch(1, pattern.region().dim()));
        }
        if pattern.region().is_empty() {
            return Ok(1.0);
        }
        let (lo, hi) = pattern.region().hull().expect("nonempty");
        let len = (hi[0] - lo[0] + 1) as usize;
        let fixed: Vec<Option<u8>> = (0..len)
            .map(|k| pattern.value_at(&site1(lo[0] + k as Coord)))
            .collect();
        let free = fixed.iter().filter(|v| v.is_none()).count();
        let needed = (self.alphabet_len as f64).powi(free as i32);
        if needed > self.enumeration_cap as f64 {
            return Err(Error::CapExceeded { needed, cap: self.enumeration_cap });
        }
        let mut word: Vec<u8> = fixed.iter().map(|v| v.unwrap_or(0)).collect();
        let free_positions: Vec<usize> = fixed
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.is_none().then_some(i))
            .collect();
        let mut total = 0.0;
        loop {
            total += self.word_prob(&word);
            let mut k = free_positions.len();
            loop {
                if k == 0 {
                    return Ok(total);
                }
                k -= 1;
                let pos = free_positions[k];
                word[pos] += 1;
                if (word[pos] as usize) < self.alphabet_len {
                    break;
                }
                word[pos] = 0;
            }
        }
    }

    /// Expectation of a product of single-site observables `obs(symbol)`
    /// over a contiguous word starting anywhere (stationarity).
    pub fn word_expectation(&self, len: usize, obs: impl Fn(&[u8]) -> f64) -> Result<f64> {
        let region = FiniteRegion::new(1, (0..len as Coord).map(site1))?;
        let needed = (self.alphabet_len as f64).powi(len as i32);
        if needed > self.enumeration_cap as f64 {
            return Err(Error::CapExceeded { needed, cap: self.enumeration_cap });
        }
        let mut total = 0.0;
        let mut word = vec![0u8; len];
        loop {
            total += self.word_prob(&word) * obs(&word);
            let mut k = len;
            loop {
                if k == 0 {
                    let _ = region;
                    return Ok(total);
                }
                k -= 1;
                word[k] += 1;
                if (word[k] as usize) < self.alphabet_len {
                    break;
                }
                word[k] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{spin, InteractionPotential, IsingParams};
    use crate::subshift::Alphabet;

    fn ising_oracle(j: f64, h: f64) -> TransferMatrixOracle {
        let spec = SftSpec::full_shift(Alphabet::spins(), 1);
        let f = InteractionPotential::ising(
            IsingParams { coupling: j, field: h },
            1,
            Alphabet::spins(),
        )
        .unwrap()
        .a_phi();
        transfer_gibbs_1d(&spec, &f).unwrap()
    }

    fn pattern1(offsets: &[Coord], values: &[u8]) -> Pattern {
        let region = FiniteRegion::new(1, offsets.iter().map(|&i| site1(i))).unwrap();
        Pattern::new(region, values.to_vec()).unwrap()
    }

    #[test]
    fn free_measure_is_uniform_bernoulli() {
        let spec = SftSpec::full_shift(Alphabet::binary(), 1);
        let oracle = transfer_gibbs_1d(&spec, &Potential::zero(1)).unwrap();
        for k in 1..=4 {
            let word = vec![1u8; k];
            let p = oracle.word_prob(&word);
            assert!((p - 0.5f64.powi(k as i32)).abs() < 1e-12, "k={k} p={p}");
        }
        // Non-contiguous cylinder: x₀=1, x₂=0 has probability 1/4.
        let p = oracle.cylinder_prob(&pattern1(&[0, 2], &[1, 0])).unwrap();
        assert!((p - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ising_nearest_neighbor_correlation_is_tanh() {
        for j in [0.2, 0.5, 1.0] {
            let oracle = ising_oracle(j, 0.0);
            let corr = oracle
                .word_expectation(2, |w| spin(w[0]) * spin(w[1]))
                .unwrap();
            assert!((corr - j.tanh()).abs() < 1e-10, "J={j}: {corr} vs {}", j.tanh());
        }
    }

    #[test]
    fn ising_magnetization_vanishes_at_zero_field() {
        let oracle = ising_oracle(0.7, 0.0);
        let mag = oracle.word_expectation(1, |w| spin(w[0])).unwrap();
        assert!(mag.abs() < 1e-10);
    }

    #[test]
    fn golden_mean_one_probability_matches_eigenvector_arithmetic() {
        let spec = SftSpec::golden_mean();
        let oracle = transfer_gibbs_1d(&spec, &Potential::zero(1)).unwrap();
        // Independent closed form from the 2×2 adjacency [[1,1],[1,0]]:
        // right Perron vector (φ, 1), stationary weight of symbol 1 is
        // 1/(φ²+1).
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let expect = 1.0 / (phi * phi + 1.0);
        let p = oracle.cylinder_prob(&pattern1(&[0], &[1])).unwrap();
        assert!((p - expect).abs() < 1e-12, "{p} vs {expect}");
        assert!((oracle.perron_value() - phi).abs() < 1e-12);
        // "11" never occurs.
        assert_eq!(oracle.word_prob(&[1, 1]), 0.0);
    }

    #[test]
    fn shift_invariance_and_additivity() {
        let oracle = ising_oracle(0.8, 0.3);
        // μ([ω]) is position independent.
        let a = oracle.cylinder_prob(&pattern1(&[0, 1], &[0, 1])).unwrap();
        let b = oracle.cylinder_prob(&pattern1(&[5, 6], &[0, 1])).unwrap();
        assert!((a - b).abs() < 1e-14);
        // Refinement additivity: μ([ω]) = Σ_a μ([ωa]).
        for word in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let whole = oracle.word_prob(&word);
            let refined: f64 = (0..2u8)
                .map(|a| {
                    let mut w = word.to_vec();
                    w.push(a);
                    oracle.word_prob(&w)
                })
                .sum();
            assert!((whole - refined).abs() <= 1e-12, "{word:?}");
        }
        // Total mass over length-3 words.
        let total = oracle.word_expectation(3, |_| 1.0).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_with_ising_weights_is_consistent() {
        let spec = SftSpec::golden_mean();
        let f = InteractionPotential::ising(
            IsingParams { coupling: 0.4, field: 0.1 },
            1,
            Alphabet::binary(),
        )
        .unwrap()
        .a_phi();
        let oracle = transfer_gibbs_1d(&spec, &f).unwrap();
        assert_eq!(oracle.word_prob(&[1, 1]), 0.0);
        let total = oracle.word_expectation(4, |_| 1.0).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_primitive_adjacency_is_rejected() {
        // Forbid "01" and "10": the chain splits into two components.
        let shape = FiniteRegion::new(1, [site1(0), site1(1)]).unwrap();
        let forbidden = vec![
            Pattern::new(shape.clone(), vec![0, 1]).unwrap(),
            Pattern::new(shape.clone(), vec![1, 0]).unwrap(),
        ];
        let spec = SftSpec::new(Alphabet::binary(), 1, shape, forbidden).unwrap();
        assert!(matches!(
            transfer_gibbs_1d(&spec, &Potential::zero(1)),
            Err(Error::NonPrimitive(_))
        ));
    }
}
