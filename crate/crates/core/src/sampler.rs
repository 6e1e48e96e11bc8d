//! Seeded single-site heat-bath dynamics on a finite torus.
//!
//! Every update draws from the single-site kernel row of the specification,
//! through the same code path the kernel module uses, so the sampler's
//! conditional probabilities and the rows agree bit for bit. Runs are
//! reproducible from the seed; empirical summaries carry per-sweep series
//! so that callers can build honest batch-mean error bars instead of fixed
//! tolerances.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::{Coord, FiniteRegion, Site};
use crate::potential::spin;
use crate::specification::{single_site_probs, single_site_scores, Specification};
use crate::subshift::{fold_periodic, SymbolSource, TailView};
use crate::{Error, Result};

/// Torus geometry, schedule, seed, and what to record.
#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub dims: Vec<u64>,
    pub sweeps: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub init_symbol: u8,
    /// Window whose pattern is counted once per sweep.
    pub window: FiniteRegion,
    /// Record the center-site conditional only every this many sweeps, so
    /// binomial error bars on the tallies stay honest under
    /// autocorrelation.
    pub conditional_stride: u64,
}

/// A torus state as a symbol source: coordinates wrap.
pub struct TorusView<'a> {
    pub dims: &'a [u64],
    pub data: &'a [u8],
}

impl<'a> SymbolSource for TorusView<'a> {
    fn dim(&self) -> usize {
        self.dims.len()
    }

    fn at(&self, coords: &[Coord]) -> u8 {
        self.data[fold_periodic(self.dims, coords)]
    }

    fn tail(&self) -> Option<TailView<'_>> {
        None
    }
}

/// Empirical measure over window patterns plus the per-sweep series needed
/// for batch-mean error bars.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure {
    pub dims: Vec<u64>,
    pub sweeps: u64,
    pub seed: u64,
    pub window: FiniteRegion,
    /// Window pattern counts, one observation per recorded sweep.
    pub counts: BTreeMap<Vec<u8>, u64>,
    /// Per-sweep torus average of `s(x_i)·s(x_{i+e_0})` along the first
    /// axis.
    pub bond_series: Vec<f64>,
    /// Center-site conditional tallies: neighbor pattern (canonical site
    /// order) to per-symbol counts.
    pub center_conditional: BTreeMap<Vec<u8>, Vec<u64>>,
}

impl EmpiricalMeasure {
    /// Empirical probability of a pattern on a subregion of the recorded
    /// window.
    pub fn window_prob(&self, region: &FiniteRegion, values: &[u8]) -> Result<f64> {
        if !region.is_subset_of(&self.window) {
            return Err(Error::ProbeTooCoarse(
                "queried region is not inside the recorded window".into(),
            ));
        }
        let idx: Vec<usize> = region
            .sites()
            .iter()
            .map(|s| self.window.position(s).expect("subset"))
            .collect();
        let mut hits = 0u64;
        let mut total = 0u64;
        for (pat, &n) in &self.counts {
            total += n;
            if idx.iter().zip(values).all(|(&i, &v)| pat[i] == v) {
                hits += n;
            }
        }
        Ok(hits as f64 / total as f64)
    }
}

/// Mean and batch-mean standard error of a series.
pub fn batch_mean_stderr(series: &[f64], batches: usize) -> (f64, f64) {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let b = batches.clamp(2, n.max(2));
    let per = n / b;
    let mut batch_means = Vec::with_capacity(b);
    for k in 0..b {
        let chunk = &series[k * per..(k + 1) * per];
        batch_means.push(chunk.iter().sum::<f64>() / per as f64);
    }
    let bm = batch_means.iter().sum::<f64>() / b as f64;
    let var = batch_means.iter().map(|m| (m - bm) * (m - bm)).sum::<f64>()
        / (b as f64 - 1.0);
    (mean, (var / b as f64).sqrt())
}

fn site_of_index(dims: &[u64], mut idx: usize) -> Vec<Coord> {
    let mut coords = vec![0 as Coord; dims.len()];
    for k in (0..dims.len()).rev() {
        coords[k] = (idx % dims[k] as usize) as Coord;
        idx /= dims[k] as usize;
    }
    coords
}

/// Runs seeded heat-bath sweeps and collects the empirical measure.
///
/// The initial configuration is the constant `init_symbol`; a sweep with no
/// movable site anywhere reports frozen dynamics instead of looping
/// silently.
pub fn heat_bath_sample(s: &Specification, cfg: &SamplerConfig) -> Result<EmpiricalMeasure> {
    let dim = s.sft.dim();
    if cfg.dims.len() != dim {
        return Err(Error::DimensionMismatch(dim, cfg.dims.len()));
    }
    if cfg.dims.iter().any(|&d| d == 0) {
        return Err(Error::Config("torus dimensions must be positive".into()));
    }
    if s.potential.window().is_none() {
        return Err(Error::Model("heat-bath sampling needs a finite-range potential".into()));
    }
    let volume: usize = cfg.dims.iter().map(|&d| d as usize).product();
    let mut state = vec![cfg.init_symbol; volume];

    // The constant initial state must itself be admissible on the torus.
    {
        let view = TorusView { dims: &cfg.dims, data: &state };
        let shape_values: Vec<u8> = s
            .sft
            .shape()
            .sites()
            .iter()
            .map(|site| view.at(site.coords()))
            .collect();
        if s.sft.forbidden().iter().any(|p| p.values() == shape_values.as_slice()) {
            return Err(Error::InadmissibleFrame(
                "constant initial state is forbidden".into(),
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    let mut bond_series = Vec::new();
    let mut center_conditional: BTreeMap<Vec<u8>, Vec<u64>> = BTreeMap::new();

    let center = Site::new(
        cfg.dims.iter().map(|&d| (d / 2) as Coord).collect::<Vec<Coord>>(),
    );
    let mut neighbor_sites: Vec<Site> = Vec::new();
    for axis in 0..dim {
        for sign in [-1, 1] {
            let mut c = center.coords().to_vec();
            c[axis] += sign;
            neighbor_sites.push(Site::new(c));
        }
    }
    neighbor_sites.sort();

    let alphabet_len = s.sft.alphabet.len();
    let total_sweeps = cfg.burn_in + cfg.sweeps;
    for sweep in 0..total_sweeps {
        let mut movable = false;
        for idx in 0..volume {
            let coords = site_of_index(&cfg.dims, idx);
            let site = Site::new(coords);
            let draw: f64 = rng.random();
            let probs = {
                let view = TorusView { dims: &cfg.dims, data: &state };
                let scores = single_site_scores(&s.sft, &s.potential, &site, &view)?;
                let admissible = scores.scores.iter().filter(|t| t.is_some()).count();
                if admissible > 1 {
                    movable = true;
                }
                single_site_probs(&scores)
            };
            let mut acc = 0.0;
            let mut chosen = cfg.init_symbol;
            for (a, &p) in probs.iter().enumerate() {
                acc += p;
                if draw < acc {
                    chosen = a as u8;
                    break;
                }
                // Guard against rounding at the top of the CDF.
                if a + 1 == alphabet_len {
                    chosen = a as u8;
                }
            }
            state[idx] = chosen;
        }
        if !movable {
            return Err(Error::FrozenDynamics);
        }
        if sweep < cfg.burn_in {
            continue;
        }

        let view = TorusView { dims: &cfg.dims, data: &state };
        // Window pattern.
        let pat: Vec<u8> = cfg.window.sites().iter().map(|s| view.at(s.coords())).collect();
        *counts.entry(pat).or_insert(0) += 1;
        // Bond average along the first axis.
        let mut bond = 0.0;
        for idx in 0..volume {
            let c = site_of_index(&cfg.dims, idx);
            let mut c2 = c.clone();
            c2[0] += 1;
            bond += spin(view.at(&c)) * spin(view.at(&c2));
        }
        bond_series.push(bond / volume as f64);
        // Center conditional, thinned.
        if (sweep - cfg.burn_in) % cfg.conditional_stride.max(1) == 0 {
            let neigh: Vec<u8> =
                neighbor_sites.iter().map(|s| view.at(s.coords())).collect();
            let entry = center_conditional
                .entry(neigh)
                .or_insert_with(|| vec![0; alphabet_len]);
            entry[view.at(center.coords()) as usize] += 1;
        }
    }

    Ok(EmpiricalMeasure {
        dims: cfg.dims.clone(),
        sweeps: cfg.sweeps,
        seed: cfg.seed,
        window: cfg.window.clone(),
        counts,
        bond_series,
        center_conditional,
    })
}
