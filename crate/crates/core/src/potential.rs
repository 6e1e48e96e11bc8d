//! Potentials with certified variation bounds.
//!
//! Two families are admitted: finite-range potentials materialized from
//! translation-invariant interaction potentials (the single-site density of
//! an absolutely summable interaction), and a long-range pair family with
//! geometric decay whose tails are summed in closed form against the frame's
//! eventual structure. Every potential carries a certificate for its
//! variation sequence `δ_n`; downstream truncations convert certificates
//! into hard error bounds. Potentials without a certificate are accepted as
//! data but refused by every operation that needs a tail.

use crate::lattice::{meeting_translates, Coord, FiniteRegion, Site};
use crate::subshift::{Alphabet, SymbolSource, TailStructure};
use crate::{Error, Result};

/// One translation-invariant interaction term: a shape containing the
/// origin and a coefficient for every pattern on it. The interaction family
/// consists of all translates of the listed shapes.
#[derive(Clone, Debug)]
pub struct InteractionTerm {
    shape: FiniteRegion,
    /// Dense table indexed by pattern code (first site most significant).
    coefficients: Vec<f64>,
    alphabet_len: usize,
}

impl InteractionTerm {
    pub fn new(shape: FiniteRegion, alphabet_len: usize, coefficients: Vec<f64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::EmptyRegion);
        }
        if !shape.contains(&Site::origin(shape.dim())) {
            return Err(Error::Model("interaction shape must contain the origin".into()));
        }
        let expected = (alphabet_len as u64).pow(shape.len() as u32);
        if coefficients.len() as u64 != expected {
            return Err(Error::Model(format!(
                "interaction term on {} sites needs {} coefficients, got {}",
                shape.len(),
                expected,
                coefficients.len()
            )));
        }
        Ok(InteractionTerm { shape, coefficients, alphabet_len })
    }

    pub fn shape(&self) -> &FiniteRegion {
        &self.shape
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficient of the translate `shape + offset` read from `src`.
    fn value<S: SymbolSource>(&self, src: &S, offset: &Site) -> f64 {
        let mut idx = 0usize;
        let mut coords = vec![0 as Coord; offset.dim()];
        for site in self.shape.sites() {
            for (k, (a, b)) in site.coords().iter().zip(offset.coords()).enumerate() {
                coords[k] = a + b;
            }
            idx = idx * self.alphabet_len + src.at(&coords) as usize;
        }
        self.coefficients[idx]
    }

    fn max_abs(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// A finite list of finite-range terms generating `Φ_Λ` by translation.
/// Translation invariance and absolute summability hold by construction.
#[derive(Clone, Debug)]
pub struct InteractionPotential {
    alphabet: Alphabet,
    dim: usize,
    terms: Vec<InteractionTerm>,
}

/// Ising coupling constant and external field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsingParams {
    pub coupling: f64,
    pub field: f64,
}

/// Spin value of a symbol index: the first symbol is +1, the second −1.
pub fn spin(v: u8) -> f64 {
    1.0 - 2.0 * v as f64
}

impl InteractionPotential {
    pub fn new(alphabet: Alphabet, dim: usize, terms: Vec<InteractionTerm>) -> Result<Self> {
        for t in &terms {
            if t.shape.dim() != dim {
                return Err(Error::DimensionMismatch(dim, t.shape.dim()));
            }
            if t.alphabet_len != alphabet.len() {
                return Err(Error::AlphabetMismatch(t.alphabet_len, alphabet.len()));
            }
        }
        Ok(InteractionPotential { alphabet, dim, terms })
    }

    /// Nearest-neighbor Ising interaction: pair terms `−J x_i x_j` along
    /// each axis and site terms `−h x_i`. Zero parameters produce an empty
    /// term list.
    pub fn ising(params: IsingParams, dim: usize, alphabet: Alphabet) -> Result<Self> {
        if alphabet.len() != 2 {
            return Err(Error::Model("Ising interaction needs a two-symbol alphabet".into()));
        }
        let mut terms = Vec::new();
        if params.coupling != 0.0 {
            for axis in 0..dim {
                let mut e = vec![0 as Coord; dim];
                e[axis] = 1;
                let shape =
                    FiniteRegion::new(dim, [Site::origin(dim), Site::new(e)])?;
                // Pattern code order on {0,1}^2: 00, 01, 10, 11.
                let coeffs = vec![
                    -params.coupling * spin(0) * spin(0),
                    -params.coupling * spin(0) * spin(1),
                    -params.coupling * spin(1) * spin(0),
                    -params.coupling * spin(1) * spin(1),
                ];
                terms.push(InteractionTerm::new(shape, 2, coeffs)?);
            }
        }
        if params.field != 0.0 {
            let shape = FiniteRegion::singleton(Site::origin(dim));
            let coeffs = vec![-params.field * spin(0), -params.field * spin(1)];
            terms.push(InteractionTerm::new(shape, 2, coeffs)?);
        }
        InteractionPotential::new(alphabet, dim, terms)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[InteractionTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `H_Λ(x) = Σ_{Δ ∩ Λ ≠ ∅} Φ_Δ(x)`: exact sum over all translates of
    /// the term shapes meeting `Λ`.
    pub fn hamiltonian<S: SymbolSource>(&self, lambda: &FiniteRegion, x: &S) -> Result<f64> {
        if lambda.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, lambda.dim()));
        }
        if lambda.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let mut h = 0.0;
        for t in &self.terms {
            for i in meeting_translates(lambda, &t.shape) {
                h += t.value(x, &i);
            }
        }
        Ok(h)
    }

    /// The single-site density `A_Φ = −Σ_{Λ∋0} Φ_Λ/|Λ|`, materialized as a
    /// finite-range potential whose dependence window is the exact union of
    /// translated term shapes, so all cocycle sums terminate exactly.
    pub fn a_phi(&self) -> Potential {
        Potential::a_phi(self.clone())
    }

    /// Union over terms of `{shape − j : j ∈ shape}`: the dependence window
    /// of `A_Φ`.
    fn dependence_window(&self) -> FiniteRegion {
        let mut sites = std::collections::BTreeSet::new();
        sites.insert(Site::origin(self.dim));
        for t in &self.terms {
            for j in t.shape.sites() {
                for s in t.shape.sites() {
                    sites.insert(s.sub(j));
                }
            }
        }
        FiniteRegion::new(self.dim, sites).expect("term dims checked")
    }

    fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.max_abs()).sum()
    }
}

/// How the variation sequence `δ_n(f)` is certified.
#[derive(Clone, Debug)]
pub enum VariationCertificate {
    /// `δ_n = 0` for all `n ≥ 1`.
    Zero,
    /// `f` is measurable with respect to the box `Λ_r`; `δ_n = 0` for
    /// `n ≥ r` and `δ_n ≤ osc` below.
    FiniteRange { range: u32, osc: f64 },
    /// `δ_n ≤ c·q^n` with `0 < q < 1`.
    Geometric { c: f64, q: f64 },
    /// No certificate: tail-dependent operations are refused.
    None,
}

#[derive(Clone, Debug)]
enum Kernel {
    Zero,
    Constant(f64),
    APhi(InteractionPotential),
    /// d=1 long-range pair potential
    /// `f(x) = amplitude · s(x_0) · Σ_{j≥1} q^j s(x_j)`.
    GeometricPair { amplitude: f64, q: f64 },
}

/// A potential: an exact pointwise evaluator together with a variation
/// certificate.
#[derive(Clone, Debug)]
pub struct Potential {
    kernel: Kernel,
    certificate: VariationCertificate,
    dim: usize,
}

impl Potential {
    pub fn zero(dim: usize) -> Self {
        Potential { kernel: Kernel::Zero, certificate: VariationCertificate::Zero, dim }
    }

    pub fn constant(value: f64, dim: usize) -> Self {
        Potential {
            kernel: Kernel::Constant(value),
            certificate: VariationCertificate::Zero,
            dim,
        }
    }

    pub fn a_phi(phi: InteractionPotential) -> Self {
        let window = phi.dependence_window();
        let range = window.max_norm() as u32 + 1;
        let osc = 2.0 * phi.sup_bound();
        let dim = phi.dim();
        Potential {
            kernel: Kernel::APhi(phi),
            certificate: VariationCertificate::FiniteRange { range, osc },
            dim,
        }
    }

    /// d=1 geometric pair potential; the two-symbol alphabet is read as
    /// spins via [`spin`].
    pub fn geometric_pair(amplitude: f64, q: f64) -> Result<Self> {
        if !(0.0 < q && q < 1.0) {
            return Err(Error::Model("geometric decay needs 0 < q < 1".into()));
        }
        let c = 2.0 * amplitude.abs() / (1.0 - q);
        Ok(Potential {
            kernel: Kernel::GeometricPair { amplitude, q },
            certificate: VariationCertificate::Geometric { c, q },
            dim: 1,
        })
    }

    /// Replace the certificate with declared geometric bounds. The caller
    /// certifies that `c·q^n` dominates the true `δ_n`; used to exercise
    /// truncated-tail paths with an exactly evaluable kernel.
    pub fn with_declared_geometric(mut self, c: f64, q: f64) -> Result<Self> {
        if !(0.0 < q && q < 1.0) {
            return Err(Error::Model("geometric decay needs 0 < q < 1".into()));
        }
        self.certificate = VariationCertificate::Geometric { c, q };
        Ok(self)
    }

    /// Strip the certificate; operations needing tails will refuse.
    pub fn uncertified(mut self) -> Self {
        self.certificate = VariationCertificate::None;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn certificate(&self) -> &VariationCertificate {
        &self.certificate
    }

    /// The finite dependence window when one exists (`f(x)` depends only on
    /// `x` restricted to the window). `None` for long-range kernels.
    pub fn window(&self) -> Option<FiniteRegion> {
        match &self.kernel {
            Kernel::Zero | Kernel::Constant(_) => Some(FiniteRegion::empty(self.dim)),
            Kernel::APhi(phi) => Some(phi.dependence_window()),
            Kernel::GeometricPair { .. } => None,
        }
    }

    /// Smallest `r` with the dependence window inside `Λ_r`, when finite.
    pub fn range(&self) -> Option<u32> {
        match &self.certificate {
            VariationCertificate::Zero => Some(1),
            VariationCertificate::FiniteRange { range, .. } => Some(*range),
            _ => None,
        }
    }

    /// `f(σ^k x)`: the potential evaluated at the configuration shifted so
    /// that the origin reads `x` at `k`.
    pub fn value_at<S: SymbolSource>(&self, src: &S, k: &Site) -> Result<f64> {
        match &self.kernel {
            Kernel::Zero => Ok(0.0),
            Kernel::Constant(c) => Ok(*c),
            Kernel::APhi(phi) => {
                let mut v = 0.0;
                for t in &phi.terms {
                    let inv = 1.0 / t.shape.len() as f64;
                    for j in t.shape.sites() {
                        // Translate of the shape whose site j lands on k.
                        let offset = k.sub(j);
                        v -= inv * t.value(src, &offset);
                    }
                }
                Ok(v)
            }
            Kernel::GeometricPair { amplitude, q } => {
                geometric_pair_value(src, k, *amplitude, *q)
            }
        }
    }

    /// `f(x)` at the origin.
    pub fn evaluate<S: SymbolSource>(&self, x: &S) -> Result<f64> {
        self.value_at(x, &Site::origin(self.dim))
    }

    /// Certified upper bound for `δ_n(f)`.
    pub fn variation_bound(&self, n: u32) -> f64 {
        debug_assert!(n >= 1);
        match &self.certificate {
            VariationCertificate::Zero => 0.0,
            VariationCertificate::FiniteRange { range, osc } => {
                if n >= *range {
                    0.0
                } else {
                    *osc
                }
            }
            VariationCertificate::Geometric { c, q } => c * q.powi(n as i32),
            VariationCertificate::None => f64::INFINITY,
        }
    }

    /// Certified upper bound on `Σ_{n>N} n^{d−1} δ_n(f)`.
    pub fn sv_tail(&self, n0: u32, dim: usize) -> Result<f64> {
        match &self.certificate {
            VariationCertificate::Zero => Ok(0.0),
            VariationCertificate::FiniteRange { range, osc } => {
                let mut s = 0.0;
                for n in (n0 + 1)..*range {
                    s += (n as f64).powi(dim as i32 - 1) * osc;
                }
                Ok(s)
            }
            VariationCertificate::Geometric { c, q } => {
                Ok(geometric_weighted_tail(*c, *q, n0, dim as i32 - 1, |n| {
                    (n as f64).powi(dim as i32 - 1)
                }))
            }
            VariationCertificate::None => Err(Error::TailNotCertifiable),
        }
    }

    /// Certified bound on the cocycle tail `Σ_{dist(k,D)>N} |f(σ^k y) −
    /// f(σ^k x)|` for points differing on a region of `diff_size` sites.
    ///
    /// Derivation: a shift `k` at sup distance `m` from the difference set
    /// sees configurations agreeing on `Λ_m`, so its term is at most `δ_m`;
    /// the number of such `k` is at most `diff_size` times the shell count
    /// `|{u : ‖u‖ = m}| = (2m+1)^d − (2m−1)^d`.
    pub fn cocycle_tail_bound(&self, n0: u32, dim: usize, diff_size: usize) -> Result<f64> {
        let shell = move |m: u32| {
            let m = m as f64;
            (2.0 * m + 1.0).powi(dim as i32) - (2.0 * m - 1.0).powi(dim as i32)
        };
        match &self.certificate {
            VariationCertificate::Zero => Ok(0.0),
            VariationCertificate::FiniteRange { range, osc } => {
                let mut s = 0.0;
                for m in (n0 + 1)..*range {
                    s += shell(m) * osc;
                }
                Ok(diff_size as f64 * s)
            }
            VariationCertificate::Geometric { c, q } => Ok(diff_size as f64
                * geometric_weighted_tail(*c, *q, n0, dim as i32, shell)),
            VariationCertificate::None => Err(Error::TailNotCertifiable),
        }
    }

    /// `f_n(x) = Σ_{i∈Λ_n} f(σ^i x)`: Birkhoff sum over the box.
    pub fn birkhoff_box_sum<S: SymbolSource>(&self, n: u32, x: &S) -> Result<f64> {
        let b = crate::lattice::box_region(n, self.dim)?;
        let mut s = 0.0;
        for i in b.sites() {
            s += self.value_at(x, i)?;
        }
        Ok(s)
    }
}

/// Upper bound on `Σ_{n>N} w(n)·c·q^n` for polynomially growing weights
/// `w(n) ≤ poly degree `deg``: terms are accumulated until the remaining
/// geometric envelope is negligible, then the envelope itself is added, so
/// the result stays an upper bound.
fn geometric_weighted_tail(c: f64, q: f64, n0: u32, deg: i32, w: impl Fn(u32) -> f64) -> f64 {
    let mut total = 0.0;
    let mut n = n0 + 1;
    loop {
        let term = c * w(n) * q.powi(n as i32);
        total += term;
        // Envelope ratio for the next terms.
        let rho = q * ((n + 1) as f64 / n as f64).powi(deg.max(0));
        if rho < 1.0 {
            let envelope = term * rho / (1.0 - rho);
            if envelope <= 1e-6 * total + f64::MIN_POSITIVE {
                return total + envelope;
            }
        }
        n += 1;
        if n > n0 + 100_000 {
            // Defensive ceiling; unreachable for q bounded away from 1.
            return total + c * w(n) * q.powi(n as i32) / (1.0 - q);
        }
    }
}

fn geometric_pair_value<S: SymbolSource>(
    src: &S,
    k: &Site,
    amplitude: f64,
    q: f64,
) -> Result<f64> {
    if src.dim() != 1 {
        return Err(Error::DimensionMismatch(1, src.dim()));
    }
    let k0 = k.coords()[0];
    let s0 = spin(src.at(&[k0]));
    let tail = src.tail().ok_or_else(|| {
        Error::InsufficientFrame("geometric pair potential needs a described tail".into())
    })?;
    // Read explicitly up to the end of the core hull, then sum the
    // structured remainder in closed form.
    let j_explicit = (tail.hi[0] - k0).max(0);
    let mut acc = 0.0;
    for j in 1..=j_explicit {
        acc += q.powi(j as i32) * spin(src.at(&[k0 + j]));
    }
    let j1 = j_explicit + 1;
    match tail.structure {
        TailStructure::Constant(c) => {
            acc += spin(c) * q.powi(j1 as i32) / (1.0 - q);
        }
        TailStructure::Periodic { dims, data } => {
            let l = dims[0] as i64;
            let ql = q.powi(l as i32);
            for r in 0..l {
                // First j ≥ j1 with (k0 + j) ≡ r (mod L).
                let j_r = j1 + (r - (k0 + j1)).rem_euclid(l);
                acc += spin(data[r as usize]) * q.powi(j_r as i32) / (1.0 - ql);
            }
        }
    }
    Ok(amplitude * s0 * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{box_region, site1, FiniteRegion};
    use crate::subshift::{Boundary, FramedConfiguration, Pattern, SftSpec};

    fn ising_1d(j: f64, h: f64) -> InteractionPotential {
        InteractionPotential::ising(
            IsingParams { coupling: j, field: h },
            1,
            Alphabet::spins(),
        )
        .unwrap()
    }

    fn all_plus() -> FramedConfiguration {
        let spec = SftSpec::full_shift(Alphabet::spins(), 1);
        FramedConfiguration::constant(&spec, 0).unwrap()
    }

    #[test]
    fn zero_potential_evaluates_to_zero() {
        let f = Potential::zero(1);
        assert_eq!(f.evaluate(&all_plus()).unwrap(), 0.0);
    }

    #[test]
    fn ising_a_phi_at_all_plus() {
        // (J/2)·x₀(x₋₁+x₁) + h·x₀ = 1 at J=1, h=0 on the all-plus point.
        let f = ising_1d(1.0, 0.0).a_phi();
        assert!((f.evaluate(&all_plus()).unwrap() - 1.0).abs() < 1e-15);
        // Pure field: h·x₀ = 2.
        let f = ising_1d(0.0, 2.0).a_phi();
        assert!((f.evaluate(&all_plus()).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ising_a_phi_alternating() {
        let spec = SftSpec::full_shift(Alphabet::spins(), 1);
        let window = Pattern::new(FiniteRegion::empty(1), vec![]).unwrap();
        let alt = FramedConfiguration::new(
            &spec,
            window,
            Boundary::Periodic { dims: vec![2], data: vec![0, 1] },
        )
        .unwrap();
        // At a + site both neighbors are −: (1/2)(−1−1) = −1.
        let f = ising_1d(1.0, 0.0).a_phi();
        assert!((f.evaluate(&alt).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_interaction_gives_zero_density() {
        let phi = ising_1d(0.0, 0.0);
        assert!(phi.is_zero());
        let f = phi.a_phi();
        assert_eq!(f.evaluate(&all_plus()).unwrap(), 0.0);
    }

    #[test]
    fn hamiltonian_examples() {
        let x = all_plus();
        let lam = FiniteRegion::singleton(site1(0));
        // J=1, h=0: the two bonds meeting the origin contribute −1 each.
        let h = ising_1d(1.0, 0.0).hamiltonian(&lam, &x).unwrap();
        assert!((h + 2.0).abs() < 1e-15);
        // Zero interaction.
        assert_eq!(ising_1d(0.0, 0.0).hamiltonian(&lam, &x).unwrap(), 0.0);
        // Pure field: single-site term −h·x₀ = −1.
        let h = ising_1d(0.0, 1.0).hamiltonian(&lam, &x).unwrap();
        assert!((h + 1.0).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_additive_for_far_regions() {
        let phi = ising_1d(0.7, 0.3);
        let x = all_plus();
        let a = FiniteRegion::new(1, [site1(0)]).unwrap();
        let b = FiniteRegion::new(1, [site1(10)]).unwrap();
        let ab = a.union(&b).unwrap();
        let ha = phi.hamiltonian(&a, &x).unwrap();
        let hb = phi.hamiltonian(&b, &x).unwrap();
        let hab = phi.hamiltonian(&ab, &x).unwrap();
        assert!((hab - ha - hb).abs() < 1e-12);
    }

    #[test]
    fn ising_term_shapes() {
        let phi = ising_1d(1.0, 0.5);
        let shapes: Vec<usize> = phi.terms().iter().map(|t| t.shape().len()).collect();
        assert_eq!(shapes, vec![2, 1]);
        let phi2 = InteractionPotential::ising(
            IsingParams { coupling: 1.0, field: 0.5 },
            2,
            Alphabet::spins(),
        )
        .unwrap();
        let shapes: Vec<usize> = phi2.terms().iter().map(|t| t.shape().len()).collect();
        assert_eq!(shapes, vec![2, 2, 1]);
    }

    #[test]
    fn variation_bounds() {
        let f = ising_1d(1.0, 0.0).a_phi();
        let r = f.range().unwrap();
        assert_eq!(r, 2);
        assert_eq!(f.variation_bound(r), 0.0);
        assert_eq!(f.variation_bound(5), 0.0);
        assert!(f.variation_bound(1) > 0.0);
        assert_eq!(Potential::zero(1).variation_bound(1), 0.0);

        let g = Potential::geometric_pair(1.0, 0.5).unwrap();
        let c = 2.0 / (1.0 - 0.5);
        assert!((g.variation_bound(3) - c * 0.125).abs() < 1e-15);
    }

    #[test]
    fn sv_tail_cases() {
        let f = ising_1d(1.0, 0.0).a_phi();
        assert_eq!(f.sv_tail(2, 1).unwrap(), 0.0);
        assert_eq!(Potential::zero(1).sv_tail(1, 1).unwrap(), 0.0);
        // Geometric in d=1 has the closed form c·q^{N+1}/(1−q).
        let g = Potential::geometric_pair(0.5, 0.5).unwrap();
        let c = 2.0 * 0.5 / 0.5;
        let exact = c * 0.5f64.powi(4) / 0.5;
        let got = g.sv_tail(3, 1).unwrap();
        assert!(got >= exact * (1.0 - 1e-9));
        assert!(got <= exact * 1.01);
        // No certificate: refuse.
        let bare = Potential::zero(1).uncertified();
        assert!(matches!(bare.sv_tail(1, 1), Err(Error::TailNotCertifiable)));
    }

    #[test]
    fn variation_bound_holds_on_random_pairs() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let f = ising_1d(0.8, 0.2).a_phi();
        let spec = SftSpec::full_shift(Alphabet::spins(), 1);
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(1..4u32);
            // Points agreeing on Λ_n, differing outside.
            let inner = box_region(n, 1).unwrap();
            let outer = box_region(n + 2, 1).unwrap();
            let shared: Vec<u8> = inner.sites().iter().map(|_| rng.random_range(0..2)).collect();
            let base = FramedConfiguration::constant(&spec, 0).unwrap();
            let mut vx = Vec::new();
            let mut vy = Vec::new();
            for s in outer.sites() {
                if inner.contains(s) {
                    let v = shared[inner.position(s).unwrap()];
                    vx.push(v);
                    vy.push(v);
                } else {
                    vx.push(rng.random_range(0..2));
                    vy.push(rng.random_range(0..2));
                }
            }
            let x = base.patch(&Pattern::new(outer.clone(), vx).unwrap()).unwrap();
            let y = base.patch(&Pattern::new(outer.clone(), vy).unwrap()).unwrap();
            let dx = f.evaluate(&x).unwrap();
            let dy = f.evaluate(&y).unwrap();
            assert!((dx - dy).abs() <= f.variation_bound(n) + 1e-12);
        }
    }

    #[test]
    fn birkhoff_sums() {
        let x = all_plus();
        assert_eq!(Potential::zero(1).birkhoff_box_sum(3, &x).unwrap(), 0.0);
        // Constant c over Λ_2 (3 sites) sums to 3c.
        let c = Potential::constant(1.5, 1);
        assert!((c.birkhoff_box_sum(2, &x).unwrap() - 4.5).abs() < 1e-15);
        let f = ising_1d(1.0, 0.0).a_phi();
        assert!((f.birkhoff_box_sum(2, &x).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn translation_invariance_of_a_phi() {
        let f = ising_1d(0.6, -0.4).a_phi();
        let spec = SftSpec::full_shift(Alphabet::spins(), 1);
        let base = FramedConfiguration::constant(&spec, 0).unwrap();
        let r = box_region(3, 1).unwrap();
        let x = base
            .patch(&Pattern::new(r.clone(), vec![0, 1, 1, 0, 1]).unwrap())
            .unwrap();
        // Evaluating at k equals evaluating the shifted frame at the origin.
        for k in -3..=3 {
            let shifted_window = x.window().translate(&site1(-k)).unwrap();
            let shifted =
                FramedConfiguration::new_unchecked(1, shifted_window, x.boundary().clone())
                    .unwrap();
            let a = f.value_at(&x, &site1(k)).unwrap();
            let b = f.evaluate(&shifted).unwrap();
            assert!((a - b).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn geometric_pair_exact_tails() {
        let f = Potential::geometric_pair(1.0, 0.5).unwrap();
        // All-plus: f = Σ q^j = q/(1−q) = 1.
        let spec = SftSpec::full_shift(Alphabet::spins(), 1);
        let x = FramedConfiguration::constant(&spec, 0).unwrap();
        assert!((f.evaluate(&x).unwrap() - 1.0).abs() < 1e-14);
        // Alternating +−+−... starting at x₁ = −: Σ q^j(−1)^j = −q/(1+q).
        let window = Pattern::new(FiniteRegion::empty(1), vec![]).unwrap();
        let alt = FramedConfiguration::new(
            &spec,
            window,
            Boundary::Periodic { dims: vec![2], data: vec![0, 1] },
        )
        .unwrap();
        let expect = -0.5 / 1.5;
        assert!((f.evaluate(&alt).unwrap() - expect).abs() < 1e-14);
        // A flipped far site shifts the value by exactly −2q^j·amp.
        let y = x
            .patch(&Pattern::new(FiniteRegion::singleton(site1(7)), vec![1]).unwrap())
            .unwrap();
        let delta = f.evaluate(&y).unwrap() - f.evaluate(&x).unwrap();
        assert!((delta + 2.0 * 0.5f64.powi(7)).abs() < 1e-14);
    }
}
