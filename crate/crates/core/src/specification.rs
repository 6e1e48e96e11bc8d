//! The specification `γ = (γ_Λ)`: proper probability kernels prescribing
//! the conditional law inside a finite region given the configuration
//! outside.
//!
//! Kernel rows are computed in the cocycle closed form: each admissible
//! pattern gets the score `t(η) = Σ_k f(σ^k (η x_{Λ^c}))` summed over the
//! shifts whose dependence window meets `Λ`, and the row is the softmax of
//! the scores. For finite-range potentials the scores are exact and the
//! pairwise score differences are exactly the cocycle values; for
//! certified-decay potentials the scores are truncated and the row carries
//! the resulting score-difference bound, which callers fold into their pass
//! thresholds (first-order: a score error `ε` moves each probability by at
//! most `e^{2ε} − 1`).
//!
//! The module also provides the finite-`n` ratio used as a convergence
//! probe, the Hamiltonian (Gibbsian) form of the same kernels, the
//! consistency and properness residuals, the kernel maps `Q_Λ`, and the
//! prefix-rewrite kernels of one-sided Markov shifts.

use crate::lattice::{meeting_translates, sites_within, Coord, FiniteRegion, Site};
use crate::numeric::log_sum_exp;
use crate::potential::{InteractionPotential, Potential};
use crate::subshift::{
    admissible_patterns, membership_after_patch, Alphabet, Cylinder, FramedConfiguration,
    Pattern, PatchedView, SftSpec, SymbolSource, TailView,
};
use crate::{Error, Result};

/// A subshift, a potential with certified variation bounds, and the base
/// tolerance used by residual reports.
#[derive(Clone, Debug)]
pub struct Specification {
    pub sft: SftSpec,
    pub potential: Potential,
    pub tolerance: f64,
}

impl Specification {
    pub fn new(sft: SftSpec, potential: Potential) -> Result<Self> {
        if sft.dim() != potential.dim() {
            return Err(Error::DimensionMismatch(sft.dim(), potential.dim()));
        }
        Ok(Specification { sft, potential, tolerance: 1e-10 })
    }
}

/// One kernel row `γ_Λ(·|x)`: log-weights (scores) per admissible pattern
/// and the probabilities they normalize to; everything else carries
/// probability zero. `score_error` bounds the truncation error of pairwise
/// score differences (zero for finite-range potentials).
#[derive(Clone, Debug)]
pub struct KernelRow {
    pub region: FiniteRegion,
    pub patterns: Vec<Pattern>,
    pub scores: Vec<f64>,
    pub probs: Vec<f64>,
    pub score_error: f64,
}

impl KernelRow {
    fn from_scores(
        region: FiniteRegion,
        patterns: Vec<Pattern>,
        scores: Vec<f64>,
        score_error: f64,
    ) -> Self {
        let lse = log_sum_exp(&scores);
        let probs = scores.iter().map(|t| (t - lse).exp()).collect();
        KernelRow { region, patterns, scores, probs, score_error }
    }

    pub fn prob_of(&self, pattern: &Pattern) -> f64 {
        self.patterns
            .iter()
            .position(|p| p == pattern)
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }

    /// `γ_Λ(A|x)` for a cylinder event, evaluated as the ratio of the
    /// restricted to the full weight sum. Events covering every admissible
    /// pattern come out exactly 1 and empty events exactly 0.
    pub fn event_prob(&self, x: &FramedConfiguration, event: &Cylinder) -> f64 {
        let mut selected = Vec::new();
        for (pat, &t) in self.patterns.iter().zip(&self.scores) {
            let view = PatchedView { base: x, patch: pat };
            if cylinder_contains(&view, event) {
                selected.push(t);
            }
        }
        if selected.is_empty() {
            return 0.0;
        }
        if selected.len() == self.scores.len() {
            return 1.0;
        }
        (log_sum_exp(&selected) - log_sum_exp(&self.scores)).exp()
    }
}

/// `log Z` of a Hamiltonian-form kernel row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionValue {
    pub log_z: f64,
}

fn cylinder_contains<S: SymbolSource>(view: &S, event: &Cylinder) -> bool {
    event
        .base
        .region()
        .sites()
        .iter()
        .zip(event.base.values())
        .all(|(s, &v)| view.at(s.coords()) == v)
}

/// Shifts contributing to scores on `lambda`, with the score-difference
/// error bound. Finite-range: exact contributing set and zero error;
/// certified decay: truncation at the smallest radius meeting `tol`.
fn score_support(
    f: &Potential,
    lambda: &FiniteRegion,
    tol: f64,
) -> Result<(Vec<Site>, f64)> {
    match f.window() {
        Some(window) => Ok((meeting_translates(lambda, &window), 0.0)),
        None => {
            let dim = f.dim();
            let mut radius = 1u32;
            let bound = loop {
                let b = f.cocycle_tail_bound(radius, dim, lambda.len())?;
                if b <= tol || radius > 10_000 {
                    break b;
                }
                radius += 1;
            };
            Ok((sites_within(lambda, radius as Coord), bound))
        }
    }
}

fn pattern_score<S: SymbolSource>(
    f: &Potential,
    base: &S,
    pattern: &Pattern,
    support: &[Site],
) -> Result<f64> {
    let view = PatchedView { base, patch: pattern };
    let mut t = 0.0;
    for k in support {
        t += f.value_at(&view, k)?;
    }
    Ok(t)
}

/// The full normalized row `γ_Λ(·|x)` over admissible patterns.
pub fn gamma_row(
    s: &Specification,
    lambda: &FiniteRegion,
    x: &FramedConfiguration,
) -> Result<KernelRow> {
    if lambda.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if lambda.len() == 1 {
        // Single-site rows share one code path with the heat-bath sampler.
        let site = &lambda.sites()[0];
        let scores = single_site_scores(&s.sft, &s.potential, site, x)?;
        let mut patterns = Vec::new();
        let mut kept = Vec::new();
        for (a, sc) in scores.scores.iter().enumerate() {
            if let Some(t) = sc {
                patterns.push(Pattern::new(lambda.clone(), vec![a as u8])?);
                kept.push(*t);
            }
        }
        return Ok(KernelRow::from_scores(
            lambda.clone(),
            patterns,
            kept,
            scores.score_error,
        ));
    }
    let patterns = admissible_patterns(&s.sft, x, lambda)?;
    let (support, score_error) = score_support(&s.potential, lambda, 1e-12)?;
    let mut scores = Vec::with_capacity(patterns.len());
    for p in &patterns {
        scores.push(pattern_score(&s.potential, x, p, &support)?);
    }
    Ok(KernelRow::from_scores(lambda.clone(), patterns, scores, score_error))
}

/// `γ_Λ([ω]|x)`: zero when the patched point leaves the subshift, otherwise
/// the normalized Boltzmann weight of `ω` among admissible patterns.
pub fn gamma_cylinder(
    s: &Specification,
    lambda: &FiniteRegion,
    omega: &Pattern,
    x: &FramedConfiguration,
) -> Result<f64> {
    if omega.region() != lambda {
        return Err(Error::RegionOverlap("pattern must live on the kernel region".into()));
    }
    if !membership_after_patch(&s.sft, x, omega)? {
        return Ok(0.0);
    }
    Ok(gamma_row(s, lambda, x)?.prob_of(omega))
}

/// The finite-`n` ratio `e^{f_n(ωx)}·1 / Σ_η e^{f_n(ηx)}·1` computed with
/// Birkhoff box sums: the convergence probe against the closed form. For a
/// finite-range potential it stabilizes exactly once the box swallows every
/// contributing shift.
pub fn gamma_limit_probe(
    s: &Specification,
    lambda: &FiniteRegion,
    omega: &Pattern,
    x: &FramedConfiguration,
    n: u32,
) -> Result<f64> {
    if omega.region() != lambda {
        return Err(Error::RegionOverlap("pattern must live on the kernel region".into()));
    }
    if !membership_after_patch(&s.sft, x, omega)? {
        return Ok(0.0);
    }
    let patterns = admissible_patterns(&s.sft, x, lambda)?;
    let mut scores = Vec::with_capacity(patterns.len());
    let mut omega_score = None;
    for p in &patterns {
        let view = PatchedView { base: x, patch: p };
        let t = s.potential.birkhoff_box_sum(n, &view)?;
        if p == omega {
            omega_score = Some(t);
        }
        scores.push(t);
    }
    let lse = log_sum_exp(&scores);
    Ok((omega_score.expect("omega admissible") - lse).exp())
}

/// Max over events of `|Σ_ω γ_Δ([ω]|x)·γ_Λ(A|ωx) − γ_Δ(A|x)|`, the finite
/// form of the consistency identity `γ_Δ γ_Λ = γ_Δ` for `Λ ⊆ Δ`.
pub fn consistency_residual(
    s: &Specification,
    delta: &FiniteRegion,
    lambda: &FiniteRegion,
    x: &FramedConfiguration,
    events: &[Cylinder],
) -> Result<f64> {
    if !lambda.is_subset_of(delta) {
        return Err(Error::RegionOverlap("consistency needs Λ ⊆ Δ".into()));
    }
    let outer = gamma_row(s, delta, x)?;
    let mut worst = 0.0f64;
    for event in events {
        let mut lhs = 0.0;
        for (pat, &w) in outer.patterns.iter().zip(&outer.probs) {
            if w == 0.0 {
                continue;
            }
            let y = x.patch(pat)?;
            let inner = gamma_row(s, lambda, &y)?;
            lhs += w * inner.event_prob(&y, event);
        }
        let rhs = outer.event_prob(x, event);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// `|γ_Λ(B|x) − 1_B(x)|` for a cylinder `B` supported off `Λ`. Both sides
/// are computed genuinely: the kernel side sums the row over patterns whose
/// patched point lies in `B`.
pub fn properness_check(
    s: &Specification,
    lambda: &FiniteRegion,
    b: &Cylinder,
    x: &FramedConfiguration,
) -> Result<f64> {
    if b.base.region().intersects(lambda) {
        return Err(Error::RegionOverlap(
            "properness event must be supported in the complement of Λ".into(),
        ));
    }
    let row = gamma_row(s, lambda, x)?;
    let kernel_side = row.event_prob(x, b);
    let indicator = if x.in_cylinder(b) { 1.0 } else { 0.0 };
    Ok((kernel_side - indicator).abs())
}

/// The Hamiltonian form of the kernel: `e^{−H_Λ(ωx)} / Σ_η e^{−H_Λ(ηx)}`
/// over admissible patterns, with `log Z_Λ(x)`.
pub fn gibbsian_gamma(
    sft: &SftSpec,
    phi: &InteractionPotential,
    lambda: &FiniteRegion,
    omega: &Pattern,
    x: &FramedConfiguration,
) -> Result<(f64, PartitionValue)> {
    let patterns = admissible_patterns(sft, x, lambda)?;
    let mut scores = Vec::with_capacity(patterns.len());
    let mut omega_score = None;
    for p in &patterns {
        let view = PatchedView { base: x, patch: p };
        let t = -phi.hamiltonian(lambda, &view)?;
        if p == omega {
            omega_score = Some(t);
        }
        scores.push(t);
    }
    let log_z = log_sum_exp(&scores);
    let prob = match omega_score {
        Some(t) => (t - log_z).exp(),
        None => 0.0,
    };
    Ok((prob, PartitionValue { log_z }))
}

/// `Q_Λ(g)(x) = Σ_ω γ_Λ([ω]|x)·1{ωx ∈ X}·g(ωx)`.
pub fn q_lambda(
    s: &Specification,
    lambda: &FiniteRegion,
    g: &dyn Fn(&FramedConfiguration) -> f64,
    x: &FramedConfiguration,
) -> Result<f64> {
    let row = gamma_row(s, lambda, x)?;
    let mut acc = 0.0;
    for (pat, &w) in row.patterns.iter().zip(&row.probs) {
        if w == 0.0 {
            continue;
        }
        acc += w * g(&x.patch(pat)?);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Single-site kernel path shared with the heat-bath sampler.
// ---------------------------------------------------------------------------

/// Scores per symbol at one site: `None` marks an inadmissible patch. The
/// sampler and the single-site kernel rows both go through this function,
/// so their probabilities agree bit for bit.
pub struct SingleSiteScores {
    pub scores: Vec<Option<f64>>,
    pub score_error: f64,
}

struct SiteOverride<'a, S: SymbolSource> {
    base: &'a S,
    coords: &'a [Coord],
    value: u8,
}

impl<'a, S: SymbolSource> SymbolSource for SiteOverride<'a, S> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn at(&self, coords: &[Coord]) -> u8 {
        if coords == self.coords {
            self.value
        } else {
            self.base.at(coords)
        }
    }

    fn tail(&self) -> Option<TailView<'_>> {
        let mut t = self.base.tail()?;
        for k in 0..t.lo.len() {
            t.lo[k] = t.lo[k].min(self.coords[k]);
            t.hi[k] = t.hi[k].max(self.coords[k]);
        }
        Some(t)
    }
}

/// Whether writing `value` at `coords` keeps the configuration locally
/// admissible: only translates of the forbidden shape through the site are
/// inspected. The base configuration is assumed admissible.
pub fn site_patch_admissible<S: SymbolSource>(
    sft: &SftSpec,
    coords: &[Coord],
    value: u8,
    src: &S,
) -> bool {
    if sft.forbidden().is_empty() {
        return true;
    }
    let site = Site::new(coords.to_vec());
    let view = SiteOverride { base: src, coords, value };
    let region = FiniteRegion::singleton(site);
    let mut window = Vec::with_capacity(sft.shape().len());
    let mut scratch = vec![0 as Coord; coords.len()];
    for i in meeting_translates(&region, sft.shape()) {
        window.clear();
        for d in sft.shape().sites() {
            for (k, (a, b)) in i.coords().iter().zip(d.coords()).enumerate() {
                scratch[k] = a + b;
            }
            window.push(view.at(&scratch));
        }
        if sft.forbidden().iter().any(|p| p.values() == window.as_slice()) {
            return false;
        }
    }
    true
}

/// Scores for every candidate symbol at `site` read through `src`.
pub fn single_site_scores<S: SymbolSource>(
    sft: &SftSpec,
    f: &Potential,
    site: &Site,
    src: &S,
) -> Result<SingleSiteScores> {
    let lambda = FiniteRegion::singleton(site.clone());
    let (support, score_error) = score_support(f, &lambda, 1e-12)?;
    let mut scores = Vec::with_capacity(sft.alphabet.len());
    for a in 0..sft.alphabet.len() as u8 {
        if !site_patch_admissible(sft, site.coords(), a, src) {
            scores.push(None);
            continue;
        }
        let view = SiteOverride { base: src, coords: site.coords(), value: a };
        let mut t = 0.0;
        for k in &support {
            t += f.value_at(&view, k)?;
        }
        scores.push(Some(t));
    }
    Ok(SingleSiteScores { scores, score_error })
}

/// Normalized probabilities from single-site scores, aligned with the
/// alphabet; inadmissible symbols get probability zero.
pub fn single_site_probs(scores: &SingleSiteScores) -> Vec<f64> {
    let kept: Vec<f64> = scores.scores.iter().flatten().copied().collect();
    let lse = log_sum_exp(&kept);
    scores
        .scores
        .iter()
        .map(|s| match s {
            Some(t) => (t - lse).exp(),
            None => 0.0,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// One-sided Markov shift kernels.
// ---------------------------------------------------------------------------

/// A one-sided nearest-neighbor shift: `allowed[a][b]` permits the word
/// `ab`.
#[derive(Clone, Debug)]
pub struct OneSidedSft {
    pub alphabet: Alphabet,
    allowed: Vec<Vec<bool>>,
}

impl OneSidedSft {
    pub fn new(alphabet: Alphabet, allowed: Vec<Vec<bool>>) -> Result<Self> {
        let n = alphabet.len();
        if allowed.len() != n || allowed.iter().any(|row| row.len() != n) {
            return Err(Error::Model("adjacency must be |A| × |A|".into()));
        }
        Ok(OneSidedSft { alphabet, allowed })
    }

    pub fn full(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        OneSidedSft { alphabet, allowed: vec![vec![true; n]; n] }
    }

    /// Golden-mean adjacency: `11` forbidden.
    pub fn golden_mean() -> Self {
        OneSidedSft {
            alphabet: Alphabet::binary(),
            allowed: vec![vec![true, true], vec![true, false]],
        }
    }

    pub fn allows(&self, a: u8, b: u8) -> bool {
        self.allowed[a as usize][b as usize]
    }
}

/// Read access to a one-sided point.
pub trait OneSidedView {
    fn at(&self, i: usize) -> u8;
}

/// A one-sided point: an explicit head followed by a repeating cycle.
#[derive(Clone, Debug)]
pub struct OneSidedPoint {
    head: Vec<u8>,
    cycle: Vec<u8>,
}

impl OneSidedPoint {
    pub fn new(sft: &OneSidedSft, head: Vec<u8>, cycle: Vec<u8>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Model("one-sided point needs a nonempty cycle".into()));
        }
        let p = OneSidedPoint { head, cycle };
        let check_len = p.head.len() + p.cycle.len() + 1;
        for i in 0..check_len {
            if !sft.allows(p.at(i), p.at(i + 1)) {
                return Err(Error::InadmissibleFrame(format!(
                    "one-sided point violates adjacency at index {i}"
                )));
            }
        }
        Ok(p)
    }
}

impl OneSidedView for OneSidedPoint {
    fn at(&self, i: usize) -> u8 {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.cycle[(i - self.head.len()) % self.cycle.len()]
        }
    }
}

struct PrefixRewrite<'a> {
    prefix: &'a [u8],
    base: &'a OneSidedPoint,
}

impl<'a> OneSidedView for PrefixRewrite<'a> {
    fn at(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.base.at(i)
        }
    }
}

/// `Q_n(g)(x) = Σ_{y∈R_n(x)} e^{f(y)} g(y) / Σ_{y∈R_n(x)} e^{f(y)}` where
/// `R_n(x)` rewrites the first `n` symbols of `x` in every admissible way.
pub fn q_n_onesided(
    sft: &OneSidedSft,
    f: &dyn Fn(&dyn OneSidedView) -> f64,
    n: usize,
    g: &dyn Fn(&dyn OneSidedView) -> f64,
    x: &OneSidedPoint,
) -> Result<f64> {
    if n == 0 {
        return Ok(g(x));
    }
    let a = sft.alphabet.len() as u8;
    let glue = x.at(n);
    let mut weights = Vec::new();
    let mut values = Vec::new();
    let mut word = vec![0u8; n];
    'outer: loop {
        let internal_ok = word.windows(2).all(|w| sft.allows(w[0], w[1]));
        if internal_ok && sft.allows(word[n - 1], glue) {
            let y = PrefixRewrite { prefix: &word, base: x };
            weights.push(f(&y));
            values.push(g(&y));
        }
        let mut k = n;
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
    if weights.is_empty() {
        return Err(Error::NoAdmissiblePrefix);
    }
    let m = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut num = 0.0;
    let mut den = 0.0;
    for (w, v) in weights.iter().zip(&values) {
        let e = (w - m).exp();
        num += e * v;
        den += e;
    }
    Ok(num / den)
}
