//! Measures with queryable cylinder probabilities, and the residual checks
//! connecting them to a specification: DLR conditionals on finite annuli,
//! conformality of block-swap pushforwards, the kernel-dual fixed point,
//! and Capocaccia multiplier pushforwards.
//!
//! Every check reduces both of its sides to finite cylinder sums. For a
//! finite-range potential the reductions are exact: the swap cocycle and
//! the kernel rows are constant on cylinders that fix the region
//! `Λ ⊕ (W ⊖ W)` (the potential window convolved with itself) together with
//! the admissibility window `Λ̃`, so probes at that resolution make the
//! integrands literally piecewise constant.

use std::collections::BTreeSet;

use crate::lattice::{enlarge_window, meeting_translates, FiniteRegion, Site};
use crate::sampler::EmpiricalMeasure;
use crate::specification::{gamma_row, Specification};
use crate::subshift::{
    all_patterns, membership_after_patch, Boundary, Cylinder, FramedConfiguration, Pattern,
};
use crate::transfer::TransferMatrixOracle;
use crate::{Error, Result};

/// A measure answering exact or empirical cylinder queries.
pub enum CylinderMeasure {
    /// Exact d=1 transfer-matrix Gibbs measure.
    Transfer(TransferMatrixOracle),
    /// Empirical pattern frequencies from a sampler run.
    Empirical(EmpiricalMeasure),
    /// Explicit probabilities on a finite window.
    Table(WindowTable),
}

/// User-supplied probabilities for every pattern on a window.
pub struct WindowTable {
    pub window: FiniteRegion,
    pub probs: std::collections::BTreeMap<Vec<u8>, f64>,
}

impl WindowTable {
    /// Checks nonnegativity and unit mass.
    pub fn new(
        window: FiniteRegion,
        probs: std::collections::BTreeMap<Vec<u8>, f64>,
    ) -> Result<Self> {
        let mut total = 0.0;
        for p in probs.values() {
            if *p < 0.0 {
                return Err(Error::Model("window table has a negative weight".into()));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Model(format!("window table mass {total} is not 1")));
        }
        Ok(WindowTable { window, probs })
    }

    fn cylinder_prob(&self, pattern: &Pattern) -> Result<f64> {
        if !pattern.region().is_subset_of(&self.window) {
            return Err(Error::ProbeTooCoarse(
                "window table cannot answer outside its window".into(),
            ));
        }
        let idx: Vec<usize> = pattern
            .region()
            .sites()
            .iter()
            .map(|s| self.window.position(s).expect("subset"))
            .collect();
        let mut total = 0.0;
        for (word, &p) in &self.probs {
            if idx.iter().zip(pattern.values()).all(|(&i, &v)| word[i] == v) {
                total += p;
            }
        }
        Ok(total)
    }
}

impl CylinderMeasure {
    pub fn cylinder_prob(&self, pattern: &Pattern) -> Result<f64> {
        match self {
            CylinderMeasure::Transfer(t) => t.cylinder_prob(pattern),
            CylinderMeasure::Empirical(e) => {
                e.window_prob(pattern.region(), pattern.values())
            }
            CylinderMeasure::Table(t) => t.cylinder_prob(pattern),
        }
    }
}

/// The region that pins down every read a single kernel row or swap cocycle
/// makes outside its own patterns: `Λ ⊕ (W ⊖ W)` for the potential window
/// `W`, united with the admissibility window `Λ̃`.
pub fn resolution_region(s: &Specification, lambda: &FiniteRegion) -> Result<FiniteRegion> {
    let window = s.potential.window().ok_or_else(|| {
        Error::Model("measure residuals need a finite-range potential".into())
    })?;
    let mut sites: BTreeSet<Site> = lambda.sites().iter().cloned().collect();
    if !window.is_empty() {
        for k in meeting_translates(lambda, &window) {
            for w in window.sites() {
                sites.insert(k.add(w));
            }
        }
    }
    let reach = FiniteRegion::new(lambda.dim(), sites)?;
    let admissibility = enlarge_window(lambda, s.sft.shape())?;
    reach.union(&admissibility)
}

/// Builds a valid framed point agreeing with `pattern`, trying each symbol
/// as the constant background.
fn frame_from_pattern(s: &Specification, pattern: &Pattern) -> Result<FramedConfiguration> {
    for bg in 0..s.sft.alphabet.len() as u8 {
        if let Ok(frame) = FramedConfiguration::new(&s.sft, pattern.clone(), Boundary::Constant(bg))
        {
            return Ok(frame);
        }
    }
    Err(Error::InadmissibleFrame(
        "pattern admits no constant-background completion".into(),
    ))
}

/// Outcome of the swap `φ_{ω,η}` restricted to a cylinder fine enough to
/// determine it: the image pattern and the constant cocycle value.
struct SwapOnCylinder {
    image: Pattern,
    log_multiplier: f64,
}

/// Determines `φ_{ω,η}` on the cylinder `[p]`: either the swap applies with
/// a constant cocycle, or the map is the identity there.
fn swap_on_cylinder(
    s: &Specification,
    omega: &Pattern,
    eta: &Pattern,
    probe: &Pattern,
) -> Result<SwapOnCylinder> {
    let lambda = omega.region();
    let identity = || SwapOnCylinder { image: probe.clone(), log_multiplier: 0.0 };
    let p_on_lambda = match probe.restrict(lambda) {
        Some(p) => p,
        None => {
            return Err(Error::ProbeTooCoarse(
                "probe must determine the swap region".into(),
            ))
        }
    };
    let target = if &p_on_lambda == omega {
        eta
    } else if &p_on_lambda == eta {
        omega
    } else {
        return Ok(identity());
    };
    if target == &p_on_lambda {
        return Ok(identity());
    }
    let x = frame_from_pattern(s, probe)?;
    if !membership_after_patch(&s.sft, &x, target)? {
        return Ok(identity());
    }
    let y = x.patch(target)?;
    let c = crate::cocycle::cocycle(&s.potential, &x, &y)?;
    let image = y.pattern_on(probe.region());
    Ok(SwapOnCylinder { image, log_multiplier: c.value })
}

/// `|φ_*μ(probe) − ∫_probe e^{c_f(x, φ^{−1}(x))} dμ|` for `φ = φ_{ω,η}`,
/// both sides reduced to cylinder sums. The probe must fix the resolution
/// region of `Λ`.
pub fn conformality_residual(
    mu: &CylinderMeasure,
    s: &Specification,
    omega: &Pattern,
    eta: &Pattern,
    probe: &Cylinder,
) -> Result<f64> {
    if omega.region() != eta.region() {
        return Err(Error::RegionOverlap("swap patterns must share a region".into()));
    }
    let required = resolution_region(s, omega.region())?;
    if !required.is_subset_of(probe.base.region()) {
        return Err(Error::ProbeTooCoarse(format!(
            "probe must fix {} sites",
            required.len()
        )));
    }
    if !s.sft.locally_admissible(&probe.base)? {
        // The probe cylinder misses the subshift entirely; both sides are
        // null.
        return Ok(0.0);
    }
    // φ is an involution, so φ^{−1}(probe) is determined by the same swap.
    let swap = swap_on_cylinder(s, omega, eta, &probe.base)?;
    let pushforward = mu.cylinder_prob(&swap.image)?;
    let integral = swap.log_multiplier.exp() * mu.cylinder_prob(&probe.base)?;
    Ok((pushforward - integral).abs())
}

/// Max of the conformality residual over every probe pattern on the
/// resolution region of the swap.
pub fn conformality_max_residual(
    mu: &CylinderMeasure,
    s: &Specification,
    omega: &Pattern,
    eta: &Pattern,
) -> Result<f64> {
    let required = resolution_region(s, omega.region())?;
    let mut worst = 0.0f64;
    for p in all_patterns(s.sft.alphabet.len(), &required, s.sft.enumeration_cap)? {
        let r = conformality_residual(mu, s, omega, eta, &Cylinder::new(p))?;
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Report entry for conditioning events that were skipped.
#[derive(Debug, Clone)]
pub struct SkippedEvent {
    pub reason: String,
}

/// Max over `ω ∈ A^Λ` and admissible annulus patterns `η` of
/// `|μ([ωη])/μ([η]) − γ_Λ([ω]|x_η)|`: the finite-annulus realization of the
/// DLR conditional equations. Annuli of width at least the interaction
/// range make the conditional Markov-exact. Zero-probability conditioning
/// patterns are skipped and logged, never imputed.
pub fn dlr_residual(
    mu: &CylinderMeasure,
    s: &Specification,
    lambda: &FiniteRegion,
    annulus_width: u32,
    skipped: &mut Vec<SkippedEvent>,
) -> Result<f64> {
    let range = s.potential.range().ok_or_else(|| {
        Error::Model("DLR residual needs a finite-range potential".into())
    })?;
    let needed = range.max(s.sft.shape().diameter() as u32);
    if annulus_width < needed {
        return Err(Error::ProbeTooCoarse(format!(
            "annulus width {annulus_width} below required {needed}"
        )));
    }
    let ball = FiniteRegion::new(
        lambda.dim(),
        crate::lattice::sites_within(lambda, annulus_width as i64),
    )?;
    let annulus = ball.difference(lambda);
    let mut worst = 0.0f64;
    for eta in all_patterns(s.sft.alphabet.len(), &annulus, s.sft.enumeration_cap)? {
        if !s.sft.locally_admissible(&eta)? {
            continue;
        }
        let p_eta = mu.cylinder_prob(&eta)?;
        if p_eta <= 0.0 {
            skipped.push(SkippedEvent {
                reason: format!("conditioning pattern has zero mass: {:?}", eta.values()),
            });
            continue;
        }
        let x_eta = match frame_from_pattern(s, &eta) {
            Ok(x) => x,
            Err(_) => {
                skipped.push(SkippedEvent {
                    reason: format!(
                        "no admissible completion for annulus pattern {:?}",
                        eta.values()
                    ),
                });
                continue;
            }
        };
        let row = gamma_row(s, lambda, &x_eta)?;
        for omega in all_patterns(s.sft.alphabet.len(), lambda, s.sft.enumeration_cap)? {
            let joint = merge_patterns(&omega, &eta)?;
            let p_joint = mu.cylinder_prob(&joint)?;
            let lhs = p_joint / p_eta;
            let rhs = row.prob_of(&omega);
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

fn merge_patterns(a: &Pattern, b: &Pattern) -> Result<Pattern> {
    let region = a.region().union(b.region())?;
    let mut values = Vec::with_capacity(region.len());
    for s in region.sites() {
        match a.value_at(s).or_else(|| b.value_at(s)) {
            Some(v) => values.push(v),
            None => unreachable!("union covers both"),
        }
    }
    Pattern::new(region, values)
}

/// Max over test cylinders `A` of `|∫ Q_Λ(1_A) dμ − μ(A)|`, the dual
/// fixed-point residual. The integral is reduced to an exact finite sum
/// over patterns on the resolution region of `Λ` joined with `A`'s region.
pub fn q_dual_fixed_point_residual(
    mu: &CylinderMeasure,
    s: &Specification,
    lambda: &FiniteRegion,
    tests: &[Cylinder],
) -> Result<f64> {
    let resolution = resolution_region(s, lambda)?;
    let mut worst = 0.0f64;
    for a in tests {
        let environment = resolution.union(a.base.region())?.difference(lambda);
        let mut integral = 0.0;
        for zeta in all_patterns(s.sft.alphabet.len(), &environment, s.sft.enumeration_cap)? {
            if !s.sft.locally_admissible(&zeta)? {
                continue;
            }
            let p_zeta = mu.cylinder_prob(&zeta)?;
            if p_zeta <= 0.0 {
                continue;
            }
            let x_zeta = match frame_from_pattern(s, &zeta) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let row = gamma_row(s, lambda, &x_zeta)?;
            integral += p_zeta * row.event_prob(&x_zeta, a);
        }
        let direct = mu.cylinder_prob(&a.base)?;
        worst = worst.max((integral - direct).abs());
    }
    Ok(worst)
}

/// `|φ_*(R_{(O,φ)} dμ_O)(probe) − μ_{φ(O)}(probe)|` for `φ = φ_{ω,η}`
/// restricted to a cylinder domain `O` refining `[ω]` or `[η]` at the
/// resolution of the swap; probes are refinements of the image cylinder.
pub fn capocaccia_residual(
    mu: &CylinderMeasure,
    s: &Specification,
    omega: &Pattern,
    eta: &Pattern,
    domain: &Cylinder,
    probe: &Cylinder,
) -> Result<f64> {
    if omega.region() != eta.region() {
        return Err(Error::RegionOverlap("swap patterns must share a region".into()));
    }
    let lambda = omega.region();
    let required = resolution_region(s, lambda)?;
    if !required.is_subset_of(domain.base.region()) {
        return Err(Error::ProbeTooCoarse("domain must fix the resolution region".into()));
    }
    let on_lambda = domain
        .base
        .restrict(lambda)
        .ok_or_else(|| Error::ProbeTooCoarse("domain must determine Λ".into()))?;
    if &on_lambda != omega && &on_lambda != eta {
        return Err(Error::ProbeTooCoarse("domain must refine [ω] or [η]".into()));
    }
    if !s.sft.locally_admissible(&domain.base)? {
        return Ok(0.0);
    }
    // The swap and its multiplier are constant on the domain.
    let swap = swap_on_cylinder(s, omega, eta, &domain.base)?;
    // The probe must refine the image cylinder φ(O).
    if !domain.base.region().is_subset_of(probe.base.region())
        || probe.base.restrict(swap.image.region()) != Some(swap.image.clone())
    {
        return Err(Error::ProbeTooCoarse("probe must refine the image cylinder".into()));
    }
    // Preimage of the probe inside O: carry the probe's extra sites back
    // through the swap (the swap only moves Λ).
    let mut preimage_values = Vec::with_capacity(probe.base.region().len());
    for site in probe.base.region().sites() {
        let v = if lambda.contains(site) {
            domain.base.value_at(site).expect("domain fixes Λ")
        } else {
            probe.base.value_at(site).expect("own site")
        };
        preimage_values.push(v);
    }
    let preimage = Pattern::new(probe.base.region().clone(), preimage_values)?;
    let lhs = swap.log_multiplier.exp() * mu.cylinder_prob(&preimage)?;
    let rhs = mu.cylinder_prob(&probe.base)?;
    Ok((lhs - rhs).abs())
}

/// Max Capocaccia residual over all domains on the resolution region that
/// refine `[ω]` or `[η]`, probing each domain's image and its one-site
/// refinements.
pub fn capocaccia_max_residual(
    mu: &CylinderMeasure,
    s: &Specification,
    omega: &Pattern,
    eta: &Pattern,
) -> Result<f64> {
    let lambda = omega.region();
    let required = resolution_region(s, lambda)?;
    let extension = pick_extension_site(&required);
    let mut worst = 0.0f64;
    for base in all_patterns(s.sft.alphabet.len(), &required, s.sft.enumeration_cap)? {
        let on_lambda = base.restrict(lambda).expect("required covers lambda");
        if &on_lambda != omega && &on_lambda != eta {
            continue;
        }
        let domain = Cylinder::new(base.clone());
        let swap = swap_on_cylinder(s, omega, eta, &base)?;
        // Base probe: the image cylinder itself.
        let r = capocaccia_residual(mu, s, omega, eta, &domain, &Cylinder::new(swap.image.clone()))?;
        worst = worst.max(r);
        // One-site refinements of the image.
        for a in 0..s.sft.alphabet.len() as u8 {
            let refined = merge_patterns(
                &swap.image,
                &Pattern::new(FiniteRegion::singleton(extension.clone()), vec![a])?,
            )?;
            let r = capocaccia_residual(mu, s, omega, eta, &domain, &Cylinder::new(refined))?;
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

fn pick_extension_site(region: &FiniteRegion) -> Site {
    let (lo, hi) = region.hull().expect("nonempty");
    let mut c = lo;
    c[0] = hi[0] + 1;
    Site::new(c)
}
