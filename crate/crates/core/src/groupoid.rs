//! Finite principal groupoids: equivalence relations on a finite unit set
//! with an additive cocycle, their convolution ∗-algebra, counting
//! measures, Radon-Nikodym derivatives, and the KMS condition for the
//! cocycle dynamics.
//!
//! On a finite equivalence class the convolution algebra is a full matrix
//! algebra, so the KMS condition against the spanning set of matrix units
//! is a complete linear criterion, not a sampling heuristic: a unit measure
//! satisfies it exactly when its pair ratios match `e^{−βc}`, which is the
//! conformality condition checked independently by `conformal_residual`.

use num_complex::Complex64;

use crate::cocycle::cocycle;
use crate::lattice::FiniteRegion;
use crate::specification::Specification;
use crate::subshift::{admissible_patterns, FramedConfiguration, Pattern};
use crate::{Error, Result};

/// An equivalence relation on `0..n_units` with an antisymmetric, additive
/// cocycle on related pairs.
#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    n_units: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    /// Per class, row-major `k×k` cocycle table aligned with member order.
    cocycle: Vec<Vec<f64>>,
}

impl FiniteGroupoid {
    /// Builds the groupoid from a partition and per-unit log-potentials:
    /// `c(x,y) = p(y) − p(x)`, additive by construction.
    pub fn from_potentials(classes: Vec<Vec<usize>>, potentials: &[f64]) -> Result<Self> {
        Self::from_pairwise(classes, |x, y| potentials[y] - potentials[x])
    }

    /// Builds the groupoid from an explicit pairwise cocycle, validating
    /// antisymmetry and additivity on every in-class triple to 1e−12.
    pub fn from_pairwise(
        classes: Vec<Vec<usize>>,
        c: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let n_units = classes.iter().map(|cl| cl.len()).sum();
        let mut seen = vec![false; n_units];
        let mut class_of = vec![0usize; n_units];
        for (ci, cl) in classes.iter().enumerate() {
            if cl.is_empty() {
                return Err(Error::GroupoidMismatch("empty class".into()));
            }
            for &u in cl {
                if u >= n_units || seen[u] {
                    return Err(Error::GroupoidMismatch(
                        "classes must partition the unit set".into(),
                    ));
                }
                seen[u] = true;
                class_of[u] = ci;
            }
        }
        let mut tables = Vec::with_capacity(classes.len());
        for cl in &classes {
            let k = cl.len();
            let mut t = vec![0.0; k * k];
            for i in 0..k {
                for j in 0..k {
                    t[i * k + j] = c(cl[i], cl[j]);
                }
            }
            for i in 0..k {
                if t[i * k + i] != 0.0 {
                    return Err(Error::GroupoidMismatch("cocycle must vanish on units".into()));
                }
                for j in 0..k {
                    if (t[i * k + j] + t[j * k + i]).abs() > 1e-12 {
                        return Err(Error::GroupoidMismatch("cocycle must be antisymmetric".into()));
                    }
                    for l in 0..k {
                        let res = (t[i * k + l] - t[i * k + j] - t[j * k + l]).abs();
                        if res > 1e-12 {
                            return Err(Error::GroupoidMismatch(format!(
                                "cocycle additivity residual {res}"
                            )));
                        }
                    }
                }
            }
            tables.push(t);
        }
        Ok(FiniteGroupoid { n_units, classes, class_of, cocycle: tables })
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    /// `c(x,y)` on related pairs.
    pub fn cocycle_value(&self, x: usize, y: usize) -> Option<f64> {
        if !self.related(x, y) {
            return None;
        }
        let ci = self.class_of[x];
        let cl = &self.classes[ci];
        let i = cl.iter().position(|&u| u == x).unwrap();
        let j = cl.iter().position(|&u| u == y).unwrap();
        Some(self.cocycle[ci][i * cl.len() + j])
    }

    /// All ordered related pairs, diagonal included.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for cl in &self.classes {
            for &x in cl {
                for &y in cl {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Dimension of the function space: Σ class-size².
    pub fn function_space_dim(&self) -> usize {
        self.classes.iter().map(|cl| cl.len() * cl.len()).sum()
    }
}

/// A finitely supported function on the groupoid: one complex block per
/// equivalence class, row-major over the class member order.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidFunction {
    blocks: Vec<Vec<Complex64>>,
}

impl GroupoidFunction {
    pub fn zero(g: &FiniteGroupoid) -> Self {
        GroupoidFunction {
            blocks: g.classes.iter().map(|cl| vec![Complex64::ZERO; cl.len() * cl.len()]).collect(),
        }
    }

    /// The indicator of the unit space: the identity of the algebra.
    pub fn unit(g: &FiniteGroupoid) -> Self {
        let mut f = Self::zero(g);
        for (ci, cl) in g.classes.iter().enumerate() {
            let k = cl.len();
            for i in 0..k {
                f.blocks[ci][i * k + i] = Complex64::ONE;
            }
        }
        f
    }

    /// The matrix unit supported on one ordered pair.
    pub fn matrix_unit(g: &FiniteGroupoid, x: usize, y: usize) -> Result<Self> {
        if !g.related(x, y) {
            return Err(Error::GroupoidMismatch("matrix unit needs a related pair".into()));
        }
        let mut f = Self::zero(g);
        let ci = g.class_of[x];
        let cl = &g.classes[ci];
        let i = cl.iter().position(|&u| u == x).unwrap();
        let j = cl.iter().position(|&u| u == y).unwrap();
        f.blocks[ci][i * cl.len() + j] = Complex64::ONE;
        Ok(f)
    }

    pub fn get(&self, g: &FiniteGroupoid, x: usize, y: usize) -> Complex64 {
        if !g.related(x, y) {
            return Complex64::ZERO;
        }
        let ci = g.class_of[x];
        let cl = &g.classes[ci];
        let i = cl.iter().position(|&u| u == x).unwrap();
        let j = cl.iter().position(|&u| u == y).unwrap();
        self.blocks[ci][i * cl.len() + j]
    }

    pub fn set(&mut self, g: &FiniteGroupoid, x: usize, y: usize, v: Complex64) -> Result<()> {
        if !g.related(x, y) {
            return Err(Error::GroupoidMismatch("unrelated pair".into()));
        }
        let ci = g.class_of[x];
        let cl = &g.classes[ci];
        let i = cl.iter().position(|&u| u == x).unwrap();
        let j = cl.iter().position(|&u| u == y).unwrap();
        self.blocks[ci][i * cl.len() + j] = v;
        Ok(())
    }

    fn matches(&self, g: &FiniteGroupoid) -> bool {
        self.blocks.len() == g.classes.len()
            && self
                .blocks
                .iter()
                .zip(&g.classes)
                .all(|(b, cl)| b.len() == cl.len() * cl.len())
    }
}

/// Convolution `(a·b)(x,z) = Σ_y a(x,y) b(y,z)`: block matrix products.
pub fn convolve(
    g: &FiniteGroupoid,
    a: &GroupoidFunction,
    b: &GroupoidFunction,
) -> Result<GroupoidFunction> {
    if !a.matches(g) || !b.matches(g) {
        return Err(Error::GroupoidMismatch("function blocks do not fit the groupoid".into()));
    }
    let mut out = GroupoidFunction::zero(g);
    for (ci, cl) in g.classes.iter().enumerate() {
        let k = cl.len();
        for i in 0..k {
            for j in 0..k {
                let mut s = Complex64::ZERO;
                for l in 0..k {
                    s += a.blocks[ci][i * k + l] * b.blocks[ci][l * k + j];
                }
                out.blocks[ci][i * k + j] = s;
            }
        }
    }
    Ok(out)
}

/// Involution `a*(x,y) = conj(a(y,x))`: conjugate transpose per block.
pub fn involution(g: &FiniteGroupoid, a: &GroupoidFunction) -> Result<GroupoidFunction> {
    if !a.matches(g) {
        return Err(Error::GroupoidMismatch("function blocks do not fit the groupoid".into()));
    }
    let mut out = GroupoidFunction::zero(g);
    for (ci, cl) in g.classes.iter().enumerate() {
        let k = cl.len();
        for i in 0..k {
            for j in 0..k {
                out.blocks[ci][i * k + j] = a.blocks[ci][j * k + i].conj();
            }
        }
    }
    Ok(out)
}

/// A probability weight per unit.
#[derive(Clone, Debug)]
pub struct UnitMeasure {
    weights: Vec<f64>,
}

impl UnitMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::GroupoidMismatch("unit weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::GroupoidMismatch(format!("unit mass {total} is not 1")));
        }
        Ok(UnitMeasure { weights })
    }

    pub fn uniform(n: usize) -> Self {
        UnitMeasure { weights: vec![1.0 / n as f64; n] }
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Left and right counting measures of `μ`: on a finite principal groupoid
/// they weigh an ordered pair `(x,y)` by `μ(x)` and `μ(y)` respectively.
pub struct CountingMeasures<'a> {
    g: &'a FiniteGroupoid,
    mu: &'a UnitMeasure,
}

pub fn counting_measures<'a>(
    g: &'a FiniteGroupoid,
    mu: &'a UnitMeasure,
) -> Result<CountingMeasures<'a>> {
    if mu.len() != g.n_units() {
        return Err(Error::GroupoidMismatch("measure size does not match units".into()));
    }
    Ok(CountingMeasures { g, mu })
}

impl<'a> CountingMeasures<'a> {
    pub fn weight_r(&self, x: usize, y: usize) -> f64 {
        if self.g.related(x, y) {
            self.mu.weight(x)
        } else {
            0.0
        }
    }

    pub fn weight_s(&self, x: usize, y: usize) -> f64 {
        if self.g.related(x, y) {
            self.mu.weight(y)
        } else {
            0.0
        }
    }

    pub fn measure_r(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs.iter().map(|&(x, y)| self.weight_r(x, y)).sum()
    }

    pub fn measure_s(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs.iter().map(|&(x, y)| self.weight_s(x, y)).sum()
    }
}

/// The Radon-Nikodym derivative `D(x,y) = μ(x)/μ(y)` on pairs where both
/// endpoints are charged, with the quasi-invariance failures reported.
pub struct RnDerivative {
    /// `(x, y, D(x,y))` over in-domain pairs.
    pub values: Vec<(usize, usize, f64)>,
    /// Pairs with exactly one charged endpoint: witnesses that `ν_r` and
    /// `ν_s` are not mutually absolutely continuous.
    pub out_of_domain: Vec<(usize, usize)>,
}

pub fn rn_derivative(g: &FiniteGroupoid, mu: &UnitMeasure) -> Result<RnDerivative> {
    if mu.len() != g.n_units() {
        return Err(Error::GroupoidMismatch("measure size does not match units".into()));
    }
    let mut values = Vec::new();
    let mut out_of_domain = Vec::new();
    for (x, y) in g.pairs() {
        let (wx, wy) = (mu.weight(x), mu.weight(y));
        if wx > 0.0 && wy > 0.0 {
            values.push((x, y, wx / wy));
        } else if wx > 0.0 || wy > 0.0 {
            out_of_domain.push((x, y));
        }
    }
    Ok(RnDerivative { values, out_of_domain })
}

/// `max |D(x,y) − e^{−β c(x,y)}|` over in-domain pairs; infinite when some
/// charged pair leaves the domain (quasi-invariance fails).
pub fn conformal_residual(g: &FiniteGroupoid, mu: &UnitMeasure, beta: f64) -> Result<f64> {
    let rn = rn_derivative(g, mu)?;
    if !rn.out_of_domain.is_empty() {
        return Ok(f64::INFINITY);
    }
    let mut worst = 0.0f64;
    for (x, y, d) in rn.values {
        let c = g.cocycle_value(x, y).expect("in-class");
        worst = worst.max((d - (-beta * c).exp()).abs());
    }
    Ok(worst)
}

/// The state `φ_μ(h) = Σ_x h(x,x) μ(x)`.
pub fn state(g: &FiniteGroupoid, mu: &UnitMeasure, h: &GroupoidFunction) -> Result<Complex64> {
    if mu.len() != g.n_units() {
        return Err(Error::GroupoidMismatch("measure size does not match units".into()));
    }
    let mut s = Complex64::ZERO;
    for x in 0..g.n_units() {
        s += h.get(g, x, x) * mu.weight(x);
    }
    Ok(s)
}

/// The analytic continuation of the cocycle dynamics to `t = iβ`:
/// `τ_{iβ}(b)(x,y) = e^{−β c(x,y)} b(x,y)`.
pub fn dynamics_at_i_beta(
    g: &FiniteGroupoid,
    beta: f64,
    b: &GroupoidFunction,
) -> Result<GroupoidFunction> {
    if !b.matches(g) {
        return Err(Error::GroupoidMismatch("function blocks do not fit the groupoid".into()));
    }
    let mut out = b.clone();
    for (ci, cl) in g.classes.iter().enumerate() {
        let k = cl.len();
        for i in 0..k {
            for j in 0..k {
                let c = g.cocycle[ci][i * k + j];
                out.blocks[ci][i * k + j] *= Complex64::from((-beta * c).exp());
            }
        }
    }
    Ok(out)
}

/// `max |φ_μ(a · τ_{iβ}(b)) − φ_μ(b · a)|` over the supplied trial pairs.
pub fn kms_residual(
    g: &FiniteGroupoid,
    mu: &UnitMeasure,
    beta: f64,
    trials: &[(GroupoidFunction, GroupoidFunction)],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (a, b) in trials {
        let lhs = state(g, mu, &convolve(g, a, &dynamics_at_i_beta(g, beta, b)?)?)?;
        let rhs = state(g, mu, &convolve(g, b, a)?)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Verdict of the finite KMS ⟺ conformal equivalence probe.
#[derive(Clone, Debug)]
pub struct EquivalenceVerdict {
    pub conformal_residual: f64,
    pub kms_residual: f64,
    pub tolerance: f64,
    /// Both residuals fall on the same side of the tolerance.
    pub consistent: bool,
}

/// Probes the equivalence with the spanning set of matrix-unit trials. The
/// budget must cover the function-space dimension so the trials span.
pub fn kms_iff_conformal_probe(
    g: &FiniteGroupoid,
    mu: &UnitMeasure,
    beta: f64,
    trial_budget: usize,
    tolerance: f64,
) -> Result<EquivalenceVerdict> {
    let needed = g.function_space_dim();
    if trial_budget < needed {
        return Err(Error::TrialBudget { given: trial_budget, needed });
    }
    let mut trials = Vec::with_capacity(needed);
    for (x, y) in g.pairs() {
        let a = GroupoidFunction::matrix_unit(g, x, y)?;
        let b = GroupoidFunction::matrix_unit(g, y, x)?;
        trials.push((a, b));
    }
    let kms = kms_residual(g, mu, beta, &trials)?;
    let conformal = conformal_residual(g, mu, beta)?;
    let consistent = (kms <= tolerance) == (conformal <= tolerance);
    Ok(EquivalenceVerdict {
        conformal_residual: conformal,
        kms_residual: kms,
        tolerance,
        consistent,
    })
}

/// A finite truncation of the homoclinic relation: all admissible patched
/// points over a fixed boundary, one equivalence class, cocycle values from
/// the potential.
pub struct Truncation {
    pub groupoid: FiniteGroupoid,
    pub units: Vec<FramedConfiguration>,
    pub patterns: Vec<Pattern>,
}

/// Builds the truncation of the Gibbs relation over `Λ` with boundary `x`.
pub fn build_truncation(
    s: &Specification,
    lambda: &FiniteRegion,
    x: &FramedConfiguration,
) -> Result<Truncation> {
    let patterns = admissible_patterns(&s.sft, x, lambda)?;
    let mut units = Vec::with_capacity(patterns.len());
    for p in &patterns {
        units.push(x.patch(p)?);
    }
    let mut table = vec![0.0; units.len() * units.len()];
    let k = units.len();
    for i in 0..k {
        for j in (i + 1)..k {
            let c = cocycle(&s.potential, &units[i], &units[j])?;
            table[i * k + j] = c.value;
            table[j * k + i] = -c.value;
        }
    }
    let groupoid =
        FiniteGroupoid::from_pairwise(vec![(0..k).collect()], |x, y| table[x * k + y])?;
    Ok(Truncation { groupoid, units, patterns })
}

/// The unit measure proportional to `e^{β p}` for per-unit log-potentials
/// `p` within classes weighted by `class_mass`: conformal for the cocycle
/// `c(x,y) = p(y) − p(x)` at inverse temperature `β`.
pub fn conformal_measure_from_potentials(
    g: &FiniteGroupoid,
    potentials: &[f64],
    class_mass: &[f64],
    beta: f64,
) -> Result<UnitMeasure> {
    if potentials.len() != g.n_units() || class_mass.len() != g.classes().len() {
        return Err(Error::GroupoidMismatch("potential/mass sizes do not match".into()));
    }
    let mut weights = vec![0.0; g.n_units()];
    for (ci, cl) in g.classes().iter().enumerate() {
        let z: f64 = cl.iter().map(|&u| (beta * potentials[u]).exp()).sum();
        for &u in cl {
            weights[u] = class_mass[ci] * (beta * potentials[u]).exp() / z;
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    UnitMeasure::new(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::site1;
    use crate::potential::{InteractionPotential, IsingParams, Potential};
    use crate::subshift::{Alphabet, SftSpec};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_unit_groupoid(c_ab: f64) -> FiniteGroupoid {
        FiniteGroupoid::from_potentials(vec![vec![0, 1]], &[0.0, c_ab]).unwrap()
    }

    #[test]
    fn truncation_of_full_shift_has_two_units() {
        let sft = SftSpec::full_shift(Alphabet::binary(), 1);
        let s = Specification::new(sft.clone(), Potential::zero(1)).unwrap();
        let x = FramedConfiguration::constant(&sft, 0).unwrap();
        let lam = FiniteRegion::singleton(site1(0));
        let t = build_truncation(&s, &lam, &x).unwrap();
        assert_eq!(t.groupoid.n_units(), 2);
        assert_eq!(t.groupoid.classes().len(), 1);
    }

    #[test]
    fn truncation_of_golden_mean_with_blocked_site_is_trivial() {
        let gm = SftSpec::golden_mean();
        let s = Specification::new(gm.clone(), Potential::zero(1)).unwrap();
        let window = Pattern::new(
            FiniteRegion::new(1, [site1(-1)]).unwrap(),
            vec![1],
        )
        .unwrap();
        let x = FramedConfiguration::new(&gm, window, crate::subshift::Boundary::Constant(0))
            .unwrap();
        let lam = FiniteRegion::singleton(site1(0));
        let t = build_truncation(&s, &lam, &x).unwrap();
        assert_eq!(t.groupoid.n_units(), 1);
        assert_eq!(t.groupoid.cocycle_value(0, 0), Some(0.0));
    }

    #[test]
    fn ising_truncation_cocycle_is_minus_four() {
        let sft = SftSpec::full_shift(Alphabet::spins(), 1);
        let f = InteractionPotential::ising(
            IsingParams { coupling: 1.0, field: 0.0 },
            1,
            Alphabet::spins(),
        )
        .unwrap()
        .a_phi();
        let s = Specification::new(sft.clone(), f).unwrap();
        let x = FramedConfiguration::constant(&sft, 0).unwrap();
        let lam = FiniteRegion::singleton(site1(0));
        let t = build_truncation(&s, &lam, &x).unwrap();
        // Unit 0 is the + patch, unit 1 the − patch.
        assert!((t.groupoid.cocycle_value(0, 1).unwrap() + 4.0).abs() < 1e-13);
    }

    #[test]
    fn convolution_is_block_matrix_multiplication() {
        let g = two_unit_groupoid(0.0);
        let mut a = GroupoidFunction::zero(&g);
        let mut b = GroupoidFunction::zero(&g);
        // a = [[1, 2], [3, 4]], b = [[5, 6], [7, 8]] as pair functions.
        let vals_a = [[1.0, 2.0], [3.0, 4.0]];
        let vals_b = [[5.0, 6.0], [7.0, 8.0]];
        for i in 0..2 {
            for j in 0..2 {
                a.set(&g, i, j, Complex64::from(vals_a[i][j])).unwrap();
                b.set(&g, i, j, Complex64::from(vals_b[i][j])).unwrap();
            }
        }
        let ab = convolve(&g, &a, &b).unwrap();
        let expect = [[19.0, 22.0], [43.0, 50.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(ab.get(&g, i, j), Complex64::from(expect[i][j]));
            }
        }
        // Unit indicator is a two-sided identity.
        let e = GroupoidFunction::unit(&g);
        assert_eq!(convolve(&g, &e, &a).unwrap(), a);
        assert_eq!(convolve(&g, &a, &e).unwrap(), a);
    }

    #[test]
    fn involution_laws() {
        let g = two_unit_groupoid(0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rand_fn = || {
            let mut f = GroupoidFunction::zero(&g);
            for (x, y) in g.pairs() {
                let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                f.set(&g, x, y, v).unwrap();
            }
            f
        };
        let a = rand_fn();
        let b = rand_fn();
        // (a·b)* = b*·a*.
        let lhs = involution(&g, &convolve(&g, &a, &b).unwrap()).unwrap();
        let rhs = convolve(
            &g,
            &involution(&g, &b).unwrap(),
            &involution(&g, &a).unwrap(),
        )
        .unwrap();
        for (x, y) in g.pairs() {
            assert!((lhs.get(&g, x, y) - rhs.get(&g, x, y)).norm() < 1e-14);
        }
        // Involution squares to the identity; symmetric real functions are
        // fixed.
        let aa = involution(&g, &involution(&g, &a).unwrap()).unwrap();
        assert_eq!(aa, a);
        let e = GroupoidFunction::unit(&g);
        assert_eq!(involution(&g, &e).unwrap(), e);
    }

    #[test]
    fn counting_measure_examples() {
        let g = two_unit_groupoid(0.0);
        let uniform = UnitMeasure::uniform(2);
        let nu = counting_measures(&g, &uniform).unwrap();
        // All four pairs weighed by the left endpoint: 2·(1/2)·2 fibers.
        assert!((nu.measure_r(&g.pairs()) - 2.0).abs() < 1e-15);
        // Diagonal only.
        let diag: Vec<(usize, usize)> = vec![(0, 0), (1, 1)];
        assert!((nu.measure_r(&diag) - 1.0).abs() < 1e-15);
        // Skewed weights.
        let mu = UnitMeasure::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let nu = counting_measures(&g, &mu).unwrap();
        assert!((nu.weight_r(0, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((nu.weight_s(0, 1) - 2.0 / 3.0).abs() < 1e-15);
        // ν_s is the flip pushforward of ν_r.
        for (x, y) in g.pairs() {
            assert_eq!(nu.weight_s(x, y), nu.weight_r(y, x));
        }
    }

    #[test]
    fn rn_derivative_examples() {
        let g = two_unit_groupoid(0.0);
        let uniform = UnitMeasure::uniform(2);
        let rn = rn_derivative(&g, &uniform).unwrap();
        assert!(rn.out_of_domain.is_empty());
        assert!(rn.values.iter().all(|&(_, _, d)| (d - 1.0).abs() < 1e-15));

        let mu = UnitMeasure::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let rn = rn_derivative(&g, &mu).unwrap();
        let d01 = rn.values.iter().find(|&&(x, y, _)| x == 0 && y == 1).unwrap().2;
        assert!((d01 - 0.5).abs() < 1e-15);

        // Charging one unit but not its class-mate breaks quasi-invariance.
        let mu = UnitMeasure::new(vec![1.0, 0.0]).unwrap();
        let rn = rn_derivative(&g, &mu).unwrap();
        assert!(rn.out_of_domain.contains(&(0, 1)));
        assert_eq!(conformal_residual(&g, &mu, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn rn_chain_rule_on_triples() {
        let g = FiniteGroupoid::from_potentials(vec![vec![0, 1, 2]], &[0.1, -0.4, 0.7]).unwrap();
        let mu = conformal_measure_from_potentials(&g, &[0.1, -0.4, 0.7], &[1.0], 1.0).unwrap();
        let rn = rn_derivative(&g, &mu).unwrap();
        let d = |x: usize, y: usize| {
            rn.values.iter().find(|&&(a, b, _)| a == x && b == y).unwrap().2
        };
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    assert!((d(x, y) * d(y, z) - d(x, z)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn conformal_residual_examples() {
        // c ≡ 0 with uniform μ.
        let g = two_unit_groupoid(0.0);
        assert_eq!(conformal_residual(&g, &UnitMeasure::uniform(2), 1.0).unwrap(), 0.0);
        // c(a,b) = ln 2 with μ = (1/3, 2/3): D(a,b) = 1/2 = e^{−ln 2}.
        let g = two_unit_groupoid(2.0f64.ln());
        let mu = UnitMeasure::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let r = conformal_residual(&g, &mu, 1.0).unwrap();
        assert!(r < 1e-15, "residual {r}");
        // The same cocycle with uniform μ misses by |1 − 1/2| on the pair
        // (a,b); the max over ordered pairs picks up |1 − 2| from (b,a).
        let rn = rn_derivative(&g, &UnitMeasure::uniform(2)).unwrap();
        let d01 = rn.values.iter().find(|&&(x, y, _)| x == 0 && y == 1).unwrap().2;
        assert!((d01 - (-(2.0f64.ln())).exp() - 0.5).abs() < 1e-15);
        let r = conformal_residual(&g, &UnitMeasure::uniform(2), 1.0).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kms_residual_examples() {
        let g = two_unit_groupoid(2.0f64.ln());
        let e = GroupoidFunction::unit(&g);
        // a = b = unit indicator: both sides are φ_μ(unit) = 1.
        for beta in [0.3, 1.0, 2.5] {
            let r = kms_residual(
                &g,
                &UnitMeasure::uniform(2),
                beta,
                &[(e.clone(), e.clone())],
            )
            .unwrap();
            assert!(r < 1e-15);
        }
        // The conformal measure passes random complex trials.
        let mu = UnitMeasure::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut trials = Vec::new();
        for _ in 0..20 {
            let mut a = GroupoidFunction::zero(&g);
            let mut b = GroupoidFunction::zero(&g);
            for (x, y) in g.pairs() {
                a.set(&g, x, y, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .unwrap();
                b.set(&g, x, y, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .unwrap();
            }
            trials.push((a, b));
        }
        let r = kms_residual(&g, &mu, 1.0, &trials).unwrap();
        assert!(r <= 1e-12, "residual {r}");
        // Uniform μ against the same cocycle fails some matrix-unit trial.
        let bad = kms_iff_conformal_probe(&g, &UnitMeasure::uniform(2), 1.0, 16, 1e-10).unwrap();
        assert!(bad.kms_residual > 1e-6);
        assert!(bad.conformal_residual > 1e-6);
        assert!(bad.consistent);
    }

    #[test]
    fn kms_probe_on_conformal_and_perturbed_measures() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let sizes = [
                rng.random_range(1..=4usize),
                rng.random_range(1..=4usize),
            ];
            let mut classes = Vec::new();
            let mut next = 0;
            for k in sizes {
                classes.push((next..next + k).collect::<Vec<_>>());
                next += k;
            }
            let potentials: Vec<f64> =
                (0..next).map(|_| rng.random_range(-1.0..1.0)).collect();
            let masses: Vec<f64> = (0..classes.len())
                .map(|_| rng.random_range(0.2..1.0))
                .collect();
            let g = FiniteGroupoid::from_potentials(classes, &potentials).unwrap();
            let mu = conformal_measure_from_potentials(&g, &potentials, &masses, 1.0).unwrap();
            let verdict =
                kms_iff_conformal_probe(&g, &mu, 1.0, g.function_space_dim(), 1e-10).unwrap();
            assert!(verdict.conformal_residual <= 1e-10);
            assert!(verdict.kms_residual <= 1e-10);
            assert!(verdict.consistent);

            // Perturbing one weight by 1.1 breaks both sides together,
            // unless every class is a singleton (cocycle trivially 0).
            if g.classes().iter().all(|cl| cl.len() == 1) {
                continue;
            }
            let mut weights: Vec<f64> = (0..g.n_units()).map(|u| mu.weight(u)).collect();
            let target = g.classes().iter().find(|cl| cl.len() > 1).unwrap()[0];
            weights[target] *= 1.1;
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let perturbed = UnitMeasure::new(weights).unwrap();
            let verdict =
                kms_iff_conformal_probe(&g, &perturbed, 1.0, g.function_space_dim(), 1e-10)
                    .unwrap();
            assert!(verdict.conformal_residual > 1e-6);
            assert!(verdict.kms_residual > 1e-6);
            assert!(verdict.consistent);
        }
    }

    #[test]
    fn singleton_classes_are_trivially_conformal() {
        let g = FiniteGroupoid::from_potentials(vec![vec![0], vec![1]], &[0.5, -0.3]).unwrap();
        let mu = UnitMeasure::new(vec![0.25, 0.75]).unwrap();
        let verdict = kms_iff_conformal_probe(&g, &mu, 2.0, 2, 1e-10).unwrap();
        assert_eq!(verdict.conformal_residual, 0.0);
        assert!(verdict.kms_residual < 1e-15);
        assert!(verdict.consistent);
    }

    #[test]
    fn state_is_positive_and_normalized() {
        let g = FiniteGroupoid::from_potentials(vec![vec![0, 1, 2]], &[0.2, -0.1, 0.4]).unwrap();
        let mu = UnitMeasure::new(vec![0.5, 0.2, 0.3]).unwrap();
        let e = GroupoidFunction::unit(&g);
        assert!((state(&g, &mu, &e).unwrap() - Complex64::ONE).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let mut a = GroupoidFunction::zero(&g);
            for (x, y) in g.pairs() {
                a.set(&g, x, y, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .unwrap();
            }
            let aa = convolve(&g, &a, &involution(&g, &a).unwrap()).unwrap();
            let v = state(&g, &mu, &aa).unwrap();
            assert!(v.im.abs() < 1e-12);
            assert!(v.re >= -1e-12);
        }
    }

    #[test]
    fn trial_budget_is_enforced() {
        let g = two_unit_groupoid(0.1);
        assert!(matches!(
            kms_iff_conformal_probe(&g, &UnitMeasure::uniform(2), 1.0, 3, 1e-10),
            Err(Error::TrialBudget { .. })
        ));
    }

    #[test]
    fn pairwise_constructor_rejects_non_cocycles() {
        let bad = FiniteGroupoid::from_pairwise(vec![vec![0, 1, 2]], |x, y| {
            if x == 0 && y == 1 {
                1.0
            } else if x == 1 && y == 0 {
                -1.0
            } else {
                0.0
            }
        });
        assert!(matches!(bad, Err(Error::GroupoidMismatch(_))));
    }
}
