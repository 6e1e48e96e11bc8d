//! Named verification suites over a configured model: the batch engine
//! behind the CLI. Each suite emits residual rows into a report whose body
//! is deterministic for a fixed config and seed.

use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{
    ExperimentConfig, MeasureBlock, SamplerBlock, SuiteName,
};
use crate::groupoid::{
    build_truncation, conformal_measure_from_potentials, kms_iff_conformal_probe,
    FiniteGroupoid, UnitMeasure,
};
use crate::lattice::{site1, Coord, FiniteRegion, Site};
use crate::measures::{
    capocaccia_max_residual, conformality_max_residual, dlr_residual,
    q_dual_fixed_point_residual, CylinderMeasure,
};
use crate::model::ModelFile;
use crate::potential::{spin, InteractionPotential, IsingParams, Potential};
use crate::report::{Report, ReportRow};
use crate::sampler::{batch_mean_stderr, heat_bath_sample, SamplerConfig};
use crate::specification::{
    consistency_residual, gamma_row, gibbsian_gamma, properness_check, Specification,
};
use crate::subshift::{
    all_patterns, Cylinder, FramedConfiguration, Pattern,
};
use crate::transfer::{transfer_gibbs_1d, TransferMatrixOracle};
use crate::{Error, Result};

pub struct SuiteOutcome {
    pub report: Report,
    pub all_pass: bool,
}

struct Context {
    model: ModelFile,
    spec: Specification,
    boundary_id: String,
    boundary: FramedConfiguration,
    lambda: FiniteRegion,
    delta: FiniteRegion,
    annulus_width: Option<u32>,
    seed: u64,
    scale: f64,
    measure: MeasureBlock,
    sampler: Option<SamplerBlock>,
    kms: crate::config::KmsBlock,
}

fn region_from(sites: &[Vec<Coord>], dim: usize) -> Result<FiniteRegion> {
    let mut parsed = Vec::with_capacity(sites.len());
    for s in sites {
        if s.len() != dim {
            return Err(Error::Config(format!("region site {s:?} is not {dim}-dimensional")));
        }
        parsed.push(Site::new(s.clone()));
    }
    Ok(FiniteRegion::new(dim, parsed)?)
}

fn build_context(cfg: &ExperimentConfig, config_path: &Path) -> Result<Context> {
    let model = ModelFile::load(&cfg.model_path(config_path))?;
    let sft = model.sft()?;
    let dim = sft.dim();
    let potential = match cfg.potential.kind.as_str() {
        "zero" => Potential::zero(dim),
        "ising" => InteractionPotential::ising(
            IsingParams {
                coupling: cfg.potential.coupling.unwrap(),
                field: cfg.potential.field.unwrap(),
            },
            dim,
            sft.alphabet.clone(),
        )?
        .a_phi(),
        "model" => model.interaction()?.a_phi(),
        "geometric-pair" => Potential::geometric_pair(
            cfg.potential.amplitude.unwrap(),
            cfg.potential.decay.unwrap(),
        )?,
        _ => unreachable!("validated"),
    };
    let boundary = model.frame(&sft, &cfg.boundary)?;
    let spec = Specification::new(sft, potential)?;
    let lambda = region_from(&cfg.regions.lambda, dim)?;
    let delta = region_from(&cfg.regions.delta, dim)?;
    Ok(Context {
        model,
        spec,
        boundary_id: cfg.boundary.clone(),
        boundary,
        lambda,
        delta,
        annulus_width: cfg.regions.annulus_width,
        seed: cfg.seed,
        scale: cfg.tolerance_scale,
        measure: cfg
            .measure
            .clone()
            .unwrap_or(MeasureBlock { kind: "transfer".into() }),
        sampler: cfg.sampler.clone(),
        kms: cfg.kms.clone().unwrap_or(crate::config::KmsBlock {
            instances: 50,
            max_class_size: 8,
            beta: 1.0,
        }),
    })
}

fn push(report: &mut Report, ctx: &Context, check: String, law: &str, region: String, residual: f64, tolerance: f64) {
    report.push(ReportRow {
        check,
        law: law.into(),
        region,
        boundary: ctx.boundary_id.clone(),
        residual,
        tolerance,
        pass: residual <= tolerance,
        note: None,
    });
}

/// Standard event family for consistency checks: single-site cylinders
/// inside Δ, the all-first-symbol cylinder on Λ, and one event straddling
/// the complement of Δ.
fn consistency_events(ctx: &Context) -> Result<Vec<Cylinder>> {
    let mut events = Vec::new();
    for s in ctx.delta.sites().iter().take(4) {
        events.push(Cylinder::new(Pattern::new(
            FiniteRegion::singleton(s.clone()),
            vec![0],
        )?));
        events.push(Cylinder::new(Pattern::new(
            FiniteRegion::singleton(s.clone()),
            vec![1.min(ctx.spec.sft.alphabet.len() as u8 - 1)],
        )?));
    }
    events.push(Cylinder::new(Pattern::new(
        ctx.lambda.clone(),
        vec![0; ctx.lambda.len()],
    )?));
    // Straddling event: one Δ site and one site beyond its hull.
    let (lo, hi) = ctx.delta.hull().expect("nonempty");
    let mut outside = lo.clone();
    outside[0] = hi[0] + 2;
    let straddle = FiniteRegion::new(
        ctx.delta.dim(),
        [ctx.delta.sites()[0].clone(), Site::new(outside)],
    )?;
    events.push(Cylinder::new(Pattern::new(straddle, vec![0, 0])?));
    Ok(events)
}

fn spec_check(ctx: &Context, report: &mut Report) -> Result<()> {
    let s = &ctx.spec;
    // Properness: cylinders supported off Λ, one containing the boundary
    // point and one avoiding it.
    let (lo, hi) = ctx.lambda.hull().expect("nonempty");
    let mut off = lo.clone();
    off[0] = hi[0] + 1 + ctx.lambda.diameter();
    let b_region = FiniteRegion::singleton(Site::new(off));
    let here = ctx.boundary.pattern_on(&b_region);
    let other_value = (here.values()[0] + 1) % ctx.spec.sft.alphabet.len() as u8;
    let away = Pattern::new(b_region.clone(), vec![other_value])?;
    for (tag, cyl) in [
        ("containing", Cylinder::new(here)),
        ("avoiding", Cylinder::new(away)),
    ] {
        let r = properness_check(s, &ctx.lambda, &cyl, &ctx.boundary)?;
        push(
            report,
            ctx,
            format!("spec.properness.{tag}"),
            "specification.properness",
            format!("{:?}", ctx.lambda),
            r,
            0.0,
        );
    }
    // Consistency over Λ ⊆ Δ.
    let events = consistency_events(ctx)?;
    let r = consistency_residual(s, &ctx.delta, &ctx.lambda, &ctx.boundary, &events)?;
    let row_err = gamma_row(s, &ctx.delta, &ctx.boundary)?.score_error;
    let tol = 1e-10 * ctx.scale + 4.0 * row_err;
    push(
        report,
        ctx,
        "spec.consistency".into(),
        "specification.consistency",
        format!("{:?} in {:?}", ctx.lambda, ctx.delta),
        r,
        tol,
    );
    // Gibbsian cross-form when the potential derives from an interaction.
    if let Ok(phi) = ctx.model.interaction() {
        let mut worst = 0.0f64;
        for omega in all_patterns(
            s.sft.alphabet.len(),
            &ctx.lambda,
            s.sft.enumeration_cap,
        )? {
            let (p_h, _) = gibbsian_gamma(&s.sft, &phi, &ctx.lambda, &omega, &ctx.boundary)?;
            let p_c = crate::specification::gamma_cylinder(s, &ctx.lambda, &omega, &ctx.boundary)?;
            worst = worst.max((p_h - p_c).abs());
        }
        push(
            report,
            ctx,
            "spec.gibbsian-form".into(),
            "specification.hamiltonian_form",
            format!("{:?}", ctx.lambda),
            worst,
            1e-8 * ctx.scale,
        );
    }
    Ok(())
}

fn oracle_for(ctx: &Context) -> Result<TransferMatrixOracle> {
    if ctx.measure.is_uniform() {
        transfer_gibbs_1d(&ctx.spec.sft, &Potential::zero(ctx.spec.sft.dim()))
    } else {
        transfer_gibbs_1d(&ctx.spec.sft, &ctx.spec.potential)
    }
}

fn standard_test_cylinders(ctx: &Context) -> Result<Vec<Cylinder>> {
    let mk = |offsets: &[Coord], values: &[u8]| -> Result<Cylinder> {
        let region = FiniteRegion::new(1, offsets.iter().map(|&i| site1(i)))?;
        Ok(Cylinder::new(Pattern::new(region, values.to_vec())?))
    };
    let _ = ctx;
    Ok(vec![
        mk(&[0], &[0])?,
        mk(&[0, 1], &[0, 0])?,
        mk(&[-1, 0, 1], &[0, 1, 0])?,
    ])
}

fn dlr_check(ctx: &Context, report: &mut Report) -> Result<()> {
    let mu = CylinderMeasure::Transfer(oracle_for(ctx)?);
    let width = ctx.annulus_width.unwrap_or_else(|| {
        ctx.spec
            .potential
            .range()
            .unwrap_or(1)
            .max(ctx.spec.sft.shape().diameter() as u32)
    });
    let mut skipped = Vec::new();
    let r = dlr_residual(&mu, &ctx.spec, &ctx.lambda, width, &mut skipped)?;
    let mut row = ReportRow {
        check: "dlr.conditional".into(),
        law: "dlr.annulus_conditional".into(),
        region: format!("{:?} width {width}", ctx.lambda),
        boundary: ctx.boundary_id.clone(),
        residual: r,
        tolerance: 1e-8 * ctx.scale,
        pass: r <= 1e-8 * ctx.scale,
        note: (!skipped.is_empty()).then(|| format!("{} conditionings skipped", skipped.len())),
    };
    if ctx.measure.is_uniform() && !ctx.matched_free_measure() {
        // Negative control: the row must fail loudly, and the report keeps
        // the pass flag honest.
        row.note = Some("negative control".into());
    }
    report.push(row);

    let tests = standard_test_cylinders(ctx)?;
    let r = q_dual_fixed_point_residual(&mu, &ctx.spec, &ctx.lambda, &tests)?;
    push(
        report,
        ctx,
        "dlr.kernel-dual-fixed-point".into(),
        "kernel_dual.fixed_point",
        format!("{:?}", ctx.lambda),
        r,
        1e-8 * ctx.scale,
    );
    Ok(())
}

impl Context {
    /// Whether the configured measure coincides with the Gibbs measure of
    /// the configured potential (the free measure matches only the zero
    /// potential).
    fn matched_free_measure(&self) -> bool {
        self.spec.potential.window().map_or(false, |w| w.is_empty())
    }
}

fn swap_patterns(ctx: &Context) -> Result<(Pattern, Pattern)> {
    let omega = Pattern::new(ctx.lambda.clone(), vec![0; ctx.lambda.len()])?;
    let eta = Pattern::new(
        ctx.lambda.clone(),
        vec![1.min(ctx.spec.sft.alphabet.len() as u8 - 1); ctx.lambda.len()],
    )?;
    Ok((omega, eta))
}

fn conformal_check(ctx: &Context, report: &mut Report) -> Result<()> {
    let mu = CylinderMeasure::Transfer(oracle_for(ctx)?);
    let (omega, eta) = swap_patterns(ctx)?;
    let r = conformality_max_residual(&mu, &ctx.spec, &omega, &eta)?;
    push(
        report,
        ctx,
        "conformal.block-swap".into(),
        "conformal.radon_nikodym",
        format!("{:?}", ctx.lambda),
        r,
        1e-8 * ctx.scale,
    );
    Ok(())
}

fn capocaccia_check(ctx: &Context, report: &mut Report) -> Result<()> {
    let mu = CylinderMeasure::Transfer(oracle_for(ctx)?);
    let (omega, eta) = swap_patterns(ctx)?;
    let r = capocaccia_max_residual(&mu, &ctx.spec, &omega, &eta)?;
    push(
        report,
        ctx,
        "capocaccia.multiplier-pushforward".into(),
        "capocaccia.multiplier",
        format!("{:?}", ctx.lambda),
        r,
        1e-8 * ctx.scale,
    );
    Ok(())
}

fn transfer_check(ctx: &Context, report: &mut Report) -> Result<()> {
    let oracle = transfer_gibbs_1d(&ctx.spec.sft, &ctx.spec.potential)?;
    // Shift invariance on two-site cylinders at two anchors.
    let mut shift_res = 0.0f64;
    for a in 0..ctx.spec.sft.alphabet.len() as u8 {
        for b in 0..ctx.spec.sft.alphabet.len() as u8 {
            let p0 = Pattern::new(
                FiniteRegion::new(1, [site1(0), site1(1)])?,
                vec![a, b],
            )?;
            let p7 = Pattern::new(
                FiniteRegion::new(1, [site1(7), site1(8)])?,
                vec![a, b],
            )?;
            shift_res = shift_res
                .max((oracle.cylinder_prob(&p0)? - oracle.cylinder_prob(&p7)?).abs());
        }
    }
    push(
        report,
        ctx,
        "transfer.shift-invariance".into(),
        "measure.shift_invariance",
        "[0,1] vs [7,8]".into(),
        shift_res,
        1e-12 * ctx.scale,
    );
    // Refinement additivity.
    let mut add_res = 0.0f64;
    for a in 0..ctx.spec.sft.alphabet.len() as u8 {
        let whole = oracle.word_prob(&[a]);
        let parts: f64 = (0..ctx.spec.sft.alphabet.len() as u8)
            .map(|b| oracle.word_prob(&[a, b]))
            .sum();
        add_res = add_res.max((whole - parts).abs());
    }
    push(
        report,
        ctx,
        "transfer.additivity".into(),
        "measure.refinement_additivity",
        "[a] vs [a·]".into(),
        add_res,
        1e-12 * ctx.scale,
    );
    let total = oracle.word_expectation(2, |_| 1.0)?;
    push(
        report,
        ctx,
        "transfer.total-mass".into(),
        "measure.normalization",
        "length-2 words".into(),
        (total - 1.0).abs(),
        1e-12 * ctx.scale,
    );
    Ok(())
}

fn kms_check(ctx: &Context, report: &mut Report) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x6b6d73);
    let beta = ctx.kms.beta;
    let tol = 1e-10 * ctx.scale;
    let mut worst_conformal = 0.0f64;
    let mut worst_kms = 0.0f64;
    let mut all_consistent = true;
    let mut perturbed_min = f64::INFINITY;
    for _ in 0..ctx.kms.instances {
        let n_classes = rng.random_range(1..=3usize);
        let mut classes = Vec::new();
        let mut next = 0usize;
        for _ in 0..n_classes {
            let k = rng.random_range(1..=ctx.kms.max_class_size);
            classes.push((next..next + k).collect::<Vec<_>>());
            next += k;
        }
        let potentials: Vec<f64> = (0..next).map(|_| rng.random_range(-1.0..1.0)).collect();
        let masses: Vec<f64> =
            (0..classes.len()).map(|_| rng.random_range(0.2..1.0)).collect();
        let g = FiniteGroupoid::from_potentials(classes, &potentials)?;
        let mu = conformal_measure_from_potentials(&g, &potentials, &masses, beta)?;
        let verdict = kms_iff_conformal_probe(&g, &mu, beta, g.function_space_dim(), tol)?;
        worst_conformal = worst_conformal.max(verdict.conformal_residual);
        worst_kms = worst_kms.max(verdict.kms_residual);
        all_consistent &= verdict.consistent;

        if let Some(target) =
            g.classes().iter().find(|cl| cl.len() > 1).map(|cl| cl[0])
        {
            let mut weights: Vec<f64> = (0..g.n_units()).map(|u| mu.weight(u)).collect();
            weights[target] *= 1.1;
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let perturbed = UnitMeasure::new(weights)?;
            let v = kms_iff_conformal_probe(&g, &perturbed, beta, g.function_space_dim(), tol)?;
            all_consistent &= v.consistent;
            perturbed_min = perturbed_min
                .min(v.conformal_residual.min(v.kms_residual));
        }
    }
    push(
        report,
        ctx,
        "kms.random-truncations.conformal".into(),
        "renault.conformal_side",
        format!("{} instances", ctx.kms.instances),
        worst_conformal,
        tol,
    );
    push(
        report,
        ctx,
        "kms.random-truncations.kms".into(),
        "renault.kms_side",
        format!("{} instances", ctx.kms.instances),
        worst_kms,
        tol,
    );
    report.push(ReportRow {
        check: "kms.random-truncations.equivalence".into(),
        law: "renault.kms_iff_conformal".into(),
        region: format!("{} instances", ctx.kms.instances),
        boundary: ctx.boundary_id.clone(),
        residual: if all_consistent { 0.0 } else { 1.0 },
        tolerance: 0.0,
        pass: all_consistent,
        note: None,
    });
    report.push(ReportRow {
        check: "kms.perturbed-measures".into(),
        law: "renault.kms_iff_conformal".into(),
        region: "1.1-scaled weights".into(),
        boundary: ctx.boundary_id.clone(),
        residual: perturbed_min,
        tolerance: f64::INFINITY,
        pass: perturbed_min > 1e-6,
        note: Some("pass requires residual > 1e-6 on every perturbed instance".into()),
    });

    // Ising-derived truncation: the kernel row is the conformal measure.
    let truncation = build_truncation(&ctx.spec, &ctx.lambda, &ctx.boundary)?;
    let row = gamma_row(&ctx.spec, &ctx.lambda, &ctx.boundary)?;
    let mu = UnitMeasure::new(row.probs.clone())?;
    let verdict = kms_iff_conformal_probe(
        &truncation.groupoid,
        &mu,
        1.0,
        truncation.groupoid.function_space_dim(),
        tol,
    )?;
    push(
        report,
        ctx,
        "kms.kernel-truncation".into(),
        "renault.kms_iff_conformal",
        format!("{:?}", ctx.lambda),
        verdict.conformal_residual.max(verdict.kms_residual),
        tol,
    );
    Ok(())
}

fn sample_check(ctx: &Context, report: &mut Report) -> Result<()> {
    let sb = ctx.sampler.as_ref().ok_or_else(|| {
        Error::Config("the sample suite needs a [sampler] block".into())
    })?;
    let init = ctx
        .spec
        .sft
        .alphabet
        .index_of(&sb.init)
        .ok_or_else(|| Error::Config(format!("unknown init symbol {:?}", sb.init)))?;
    let window = FiniteRegion::new(
        ctx.spec.sft.dim(),
        (0..sb.window as Coord).map(|i| {
            let mut c = vec![0; ctx.spec.sft.dim()];
            c[0] = i;
            Site::new(c)
        }),
    )?;
    let cfg = SamplerConfig {
        dims: sb.dims.clone(),
        sweeps: sb.sweeps,
        burn_in: sb.burn_in,
        seed: ctx.seed,
        init_symbol: init,
        window,
        conditional_stride: 5,
    };
    let emp = heat_bath_sample(&ctx.spec, &cfg)?;

    if ctx.spec.sft.dim() == 1 && ctx.spec.potential.window().is_some() {
        // Bond correlation against the exact transfer value, 3σ by batch
        // means.
        let oracle = transfer_gibbs_1d(&ctx.spec.sft, &ctx.spec.potential)?;
        let target = oracle.word_expectation(2, |w| spin(w[0]) * spin(w[1]))?;
        let (mean, se) = batch_mean_stderr(&emp.bond_series, 100);
        push(
            report,
            ctx,
            "sample.bond-correlation".into(),
            "sampler.matches_transfer",
            format!("torus {:?}", sb.dims),
            (mean - target).abs(),
            3.0 * se,
        );
    }
    // Center-site conditional against the kernel row, for every neighbor
    // pattern with enough thinned observations.
    let mut worst_z = 0.0f64;
    let mut compared = 0usize;
    for (neigh, tallies) in &emp.center_conditional {
        let n: u64 = tallies.iter().sum();
        if n < 100 {
            continue;
        }
        // Rebuild the neighbor geometry used by the sampler.
        let center = Site::new(
            cfg.dims.iter().map(|&d| (d / 2) as Coord).collect::<Vec<Coord>>(),
        );
        let mut sites = Vec::new();
        for axis in 0..ctx.spec.sft.dim() {
            for sign in [-1, 1] {
                let mut c = center.coords().to_vec();
                c[axis] += sign;
                sites.push(Site::new(c));
            }
        }
        sites.sort();
        let region = FiniteRegion::new(ctx.spec.sft.dim(), sites.clone())?;
        let frame = FramedConfiguration::new_unchecked(
            ctx.spec.sft.dim(),
            Pattern::new(region, neigh.clone())?,
            crate::subshift::Boundary::Constant(init),
        )?;
        let row = gamma_row(&ctx.spec, &FiniteRegion::singleton(center), &frame)?;
        for (pat, &p) in row.patterns.iter().zip(&row.probs) {
            let a = pat.values()[0] as usize;
            let observed = tallies[a] as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt().max(1e-9);
            worst_z = worst_z.max((observed - p).abs() / sigma);
        }
        compared += 1;
    }
    if compared > 0 {
        push(
            report,
            ctx,
            "sample.center-conditional".into(),
            "sampler.matches_kernel_row",
            format!("{compared} neighbor patterns"),
            worst_z,
            3.0,
        );
    }
    Ok(())
}

/// Runs the configured suite (or the one overriding it) and assembles the
/// report.
pub fn run_suite(
    cfg: &ExperimentConfig,
    config_path: &Path,
    suite_override: Option<SuiteName>,
) -> Result<SuiteOutcome> {
    let ctx = build_context(cfg, config_path)?;
    let suite = suite_override.unwrap_or(cfg.suite);
    let mut report = Report::default();
    report.header.push(format!("config: {}", config_path.display()));
    report.header.push(format!("seed: {}", ctx.seed));
    report.header.push(format!("tolerance-scale: {}", ctx.scale));

    let d1_oracle_ready =
        ctx.spec.sft.dim() == 1 && ctx.spec.potential.window().is_some();
    match suite {
        SuiteName::SpecCheck => spec_check(&ctx, &mut report)?,
        SuiteName::DlrCheck => dlr_check(&ctx, &mut report)?,
        SuiteName::ConformalCheck => conformal_check(&ctx, &mut report)?,
        SuiteName::CapocacciaCheck => capocaccia_check(&ctx, &mut report)?,
        SuiteName::KmsCheck => kms_check(&ctx, &mut report)?,
        SuiteName::Sample => sample_check(&ctx, &mut report)?,
        SuiteName::Transfer1d => transfer_check(&ctx, &mut report)?,
        SuiteName::All => {
            spec_check(&ctx, &mut report)?;
            kms_check(&ctx, &mut report)?;
            if d1_oracle_ready {
                transfer_check(&ctx, &mut report)?;
                dlr_check(&ctx, &mut report)?;
                conformal_check(&ctx, &mut report)?;
                capocaccia_check(&ctx, &mut report)?;
            }
            if ctx.sampler.is_some() {
                sample_check(&ctx, &mut report)?;
            }
        }
    }
    let all_pass = report.all_pass();
    Ok(SuiteOutcome { report, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_demo(dir: &Path) -> std::path::PathBuf {
        let model = r#"
schema = 1
name = "spins"
dimension = 1
alphabet = ["+", "-"]

[[frames]]
id = "plus"
kind = "constant"
symbol = "+"

[interaction]
ising = { coupling = 0.3, field = 0.0 }
"#;
        std::fs::write(dir.join("spins.toml"), model).unwrap();
        let config = r#"
schema = 1
model = "spins.toml"
suite = "all"
seed = 5
boundary = "plus"

[potential]
kind = "ising"
coupling = 0.3
field = 0.0

[regions]
lambda = [[0]]
delta = [[-1], [0], [1]]

[sampler]
dims = [48]
sweeps = 4000
burn_in = 200
init = "+"
"#;
        let path = dir.join("demo.toml");
        std::fs::write(&path, config).unwrap();
        path
    }

    #[test]
    fn full_suite_passes_on_matched_ising() {
        let dir = std::env::temp_dir().join(format!("gibbslab-suite-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = write_demo(&dir);
        let cfg = ExperimentConfig::load(&path).unwrap();
        let outcome = run_suite(&cfg, &path, None).unwrap();
        assert!(
            outcome.all_pass,
            "failing rows:\n{}",
            outcome.report.human_table()
        );
        // Determinism: the body is byte-identical across runs.
        let again = run_suite(&cfg, &path, None).unwrap();
        assert_eq!(outcome.report.body(), again.report.body());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn uniform_negative_control_fails_dlr() {
        let dir =
            std::env::temp_dir().join(format!("gibbslab-suite-neg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = write_demo(&dir);
        let text = std::fs::read_to_string(&path).unwrap();
        let text = text.replace(
            "[potential]\nkind = \"ising\"\ncoupling = 0.3",
            "[measure]\nkind = \"uniform\"\n\n[potential]\nkind = \"ising\"\ncoupling = 1.0",
        );
        std::fs::write(&path, text).unwrap();
        let cfg = ExperimentConfig::load(&path).unwrap();
        let outcome = run_suite(&cfg, &path, Some(SuiteName::DlrCheck)).unwrap();
        assert!(!outcome.all_pass);
        let row = outcome
            .report
            .rows
            .iter()
            .find(|r| r.check == "dlr.conditional")
            .unwrap();
        assert!(row.residual >= 0.05);
        std::fs::remove_dir_all(&dir).ok();
    }
}
