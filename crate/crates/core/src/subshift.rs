//! Finite-alphabet subshifts of finite type over `Z^d`.
//!
//! Points of the subshift are represented as [`FramedConfiguration`]s: an
//! explicit pattern on a finite window together with a finitely described
//! boundary (constant, periodic, or tabulated exceptions over a constant).
//! Every formula evaluated downstream reads a point through finitely many
//! coordinates, so this finite description is exact, not an approximation.
//!
//! Membership after patching a pattern into a finite region is decided
//! locally: only translates of the forbidden shape that meet the patched
//! region need inspection, and every site those translates read lies inside
//! the enlarged window of the region. The frame itself is verified once at
//! construction over its describable extent.

use std::collections::BTreeMap;

use crate::lattice::{meeting_translates, Coord, FiniteRegion, Site};
use crate::{Error, Result, DEFAULT_ENUMERATION_CAP};

/// Finite ordered symbol set. Symbols are addressed by index everywhere;
/// the names only matter for model files and reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for s in &symbols {
            if !seen.insert(s.clone()) {
                return Err(Error::Model(format!("duplicate alphabet symbol {s:?}")));
            }
        }
        if symbols.is_empty() {
            return Err(Error::Model("alphabet must not be empty".into()));
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::Model("alphabet larger than 255 symbols".into()));
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Self {
        Alphabet { symbols: vec!["0".into(), "1".into()] }
    }

    pub fn spins() -> Self {
        Alphabet { symbols: vec!["+".into(), "-".into()] }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, index: u8) -> &str {
        &self.symbols[index as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u8> {
        self.symbols.iter().position(|s| s == name).map(|i| i as u8)
    }
}

/// A pattern: one symbol per site of a finite region, values aligned with
/// the region's canonical site order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    region: FiniteRegion,
    values: Vec<u8>,
}

impl Pattern {
    pub fn new(region: FiniteRegion, values: Vec<u8>) -> Result<Self> {
        if region.len() != values.len() {
            return Err(Error::Model(format!(
                "pattern has {} values for a region of {} sites",
                values.len(),
                region.len()
            )));
        }
        Ok(Pattern { region, values })
    }

    pub fn region(&self) -> &FiniteRegion {
        &self.region
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn value_at(&self, site: &Site) -> Option<u8> {
        self.region.position(site).map(|i| self.values[i])
    }

    /// Restriction to a subregion; `None` if any site is missing.
    pub fn restrict(&self, sub: &FiniteRegion) -> Option<Pattern> {
        let mut values = Vec::with_capacity(sub.len());
        for s in sub.sites() {
            values.push(self.value_at(s)?);
        }
        Some(Pattern { region: sub.clone(), values })
    }

    /// The same values carried to `region + j`.
    pub fn translate(&self, j: &Site) -> Result<Pattern> {
        let region = crate::lattice::translate(&self.region, j)?;
        // Canonical order is preserved under translation, so values align.
        Ok(Pattern { region, values: self.values.clone() })
    }
}

impl std::fmt::Debug for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Pattern{:?}={:?}", self.region, self.values)
    }
}

/// Enumerate all patterns on `region` in canonical order (values vectors in
/// lexicographic order). Respects the enumeration cap.
pub fn all_patterns(
    alphabet_len: usize,
    region: &FiniteRegion,
    cap: u64,
) -> Result<Vec<Pattern>> {
    let needed = (alphabet_len as f64).powi(region.len() as i32);
    if needed > cap as f64 {
        return Err(Error::CapExceeded { needed, cap });
    }
    let n = region.len();
    let mut out = Vec::with_capacity(needed as usize);
    let mut values = vec![0u8; n];
    loop {
        out.push(Pattern { region: region.clone(), values: values.clone() });
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            values[k] += 1;
            if (values[k] as usize) < alphabet_len {
                break;
            }
            values[k] = 0;
        }
    }
}

/// A cylinder set `[ω] = {x : x_Λ = ω}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    pub base: Pattern,
}

impl Cylinder {
    pub fn new(base: Pattern) -> Self {
        Cylinder { base }
    }
}

/// A subshift of finite type: all forbidden patterns sit on a common finite
/// shape containing the origin.
#[derive(Clone, Debug)]
pub struct SftSpec {
    pub alphabet: Alphabet,
    dim: usize,
    shape: FiniteRegion,
    forbidden: Vec<Pattern>,
    pub enumeration_cap: u64,
}

impl SftSpec {
    pub fn new(
        alphabet: Alphabet,
        dim: usize,
        shape: FiniteRegion,
        forbidden: Vec<Pattern>,
    ) -> Result<Self> {
        if shape.dim() != dim {
            return Err(Error::DimensionMismatch(dim, shape.dim()));
        }
        if shape.is_empty() {
            return Err(Error::EmptyRegion);
        }
        if !shape.contains(&Site::origin(dim)) {
            return Err(Error::Model("forbidden shape must contain the origin".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in &forbidden {
            if p.region() != &shape {
                return Err(Error::Model(
                    "every forbidden pattern must live on the common shape".into(),
                ));
            }
            for &v in p.values() {
                if v as usize >= alphabet.len() {
                    return Err(Error::AlphabetMismatch(v as usize, alphabet.len()));
                }
            }
            if !seen.insert(p.values().to_vec()) {
                return Err(Error::Model("duplicate forbidden pattern".into()));
            }
        }
        Ok(SftSpec {
            alphabet,
            dim,
            shape,
            forbidden,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        })
    }

    /// The full shift: nothing forbidden. Shape defaults to the origin.
    pub fn full_shift(alphabet: Alphabet, dim: usize) -> Self {
        let shape = FiniteRegion::singleton(Site::origin(dim));
        SftSpec {
            alphabet,
            dim,
            shape,
            forbidden: Vec::new(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    /// The golden-mean shift in d=1: binary alphabet, "11" forbidden.
    pub fn golden_mean() -> Self {
        let shape = FiniteRegion::new(1, [Site::new(vec![0]), Site::new(vec![1])]).unwrap();
        let forbidden = vec![Pattern::new(shape.clone(), vec![1, 1]).unwrap()];
        SftSpec::new(Alphabet::binary(), 1, shape, forbidden).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &FiniteRegion {
        &self.shape
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    fn matches_forbidden(&self, values: &[u8]) -> bool {
        self.forbidden.iter().any(|p| p.values() == values)
    }

    /// True when no translate of the shape fully contained in `p.region`
    /// carries a forbidden pattern.
    pub fn locally_admissible(&self, p: &Pattern) -> Result<bool> {
        if p.region().dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, p.region().dim()));
        }
        for &v in p.values() {
            if v as usize >= self.alphabet.len() {
                return Err(Error::AlphabetMismatch(v as usize, self.alphabet.len()));
            }
        }
        if self.forbidden.is_empty() {
            return Ok(true);
        }
        let mut window = Vec::with_capacity(self.shape.len());
        for i in meeting_translates(p.region(), &self.shape) {
            window.clear();
            let mut inside = true;
            for d in self.shape.sites() {
                match p.value_at(&i.add(d)) {
                    Some(v) => window.push(v),
                    None => {
                        inside = false;
                        break;
                    }
                }
            }
            if inside && self.matches_forbidden(&window) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Read access to a (possibly infinite) configuration by site coordinates.
/// `tail` exposes the eventual structure beyond a finite core when the
/// source has one; long-range potentials need it to sum their tails exactly.
pub trait SymbolSource {
    fn dim(&self) -> usize;
    fn at(&self, coords: &[Coord]) -> u8;
    fn tail(&self) -> Option<TailView<'_>> {
        None
    }
}

/// Eventual structure of a configuration: outside the componentwise hull
/// `[lo, hi]`, symbols follow `structure`.
#[derive(Clone, Debug)]
pub struct TailView<'a> {
    pub lo: Vec<Coord>,
    pub hi: Vec<Coord>,
    pub structure: TailStructure<'a>,
}

#[derive(Clone, Debug)]
pub enum TailStructure<'a> {
    Constant(u8),
    Periodic { dims: &'a [u64], data: &'a [u8] },
}

/// Boundary description of a framed configuration off its window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Boundary {
    Constant(u8),
    /// Row-major torus pattern; site `i` reads `data[fold(i mod dims)]`.
    Periodic { dims: Vec<u64>, data: Vec<u8> },
    /// Finitely many exceptions over a constant background.
    Tabulated { background: u8, exceptions: BTreeMap<Site, u8> },
}

impl Boundary {
    fn at(&self, coords: &[Coord]) -> u8 {
        match self {
            Boundary::Constant(c) => *c,
            Boundary::Periodic { dims, data } => data[fold_periodic(dims, coords)],
            Boundary::Tabulated { background, exceptions } => {
                // Callers route exception sites through the core; this path
                // is the plain background.
                exceptions
                    .get(&Site::new(coords.to_vec()))
                    .copied()
                    .unwrap_or(*background)
            }
        }
    }

    fn max_symbol(&self) -> u8 {
        match self {
            Boundary::Constant(c) => *c,
            Boundary::Periodic { data, .. } => data.iter().copied().max().unwrap_or(0),
            Boundary::Tabulated { background, exceptions } => exceptions
                .values()
                .copied()
                .chain([*background])
                .max()
                .unwrap(),
        }
    }
}

pub(crate) fn fold_periodic(dims: &[u64], coords: &[Coord]) -> usize {
    let mut idx = 0usize;
    for (k, &d) in dims.iter().enumerate() {
        let m = coords[k].rem_euclid(d as Coord) as usize;
        idx = idx * d as usize + m;
    }
    idx
}

/// A point of the subshift as finite data: an explicit window pattern plus a
/// boundary valid everywhere off the window. Total — `x_i` is defined for
/// every site — so evaluation never truncates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramedConfiguration {
    window: Pattern,
    boundary: Boundary,
    dim: usize,
}

impl FramedConfiguration {
    /// Checked constructor: verifies the induced total configuration is
    /// admissible for `spec` over the frame's full describable extent
    /// (window and exceptions enlarged by the forbidden shape, plus one
    /// structural check per boundary kind).
    pub fn new(spec: &SftSpec, window: Pattern, boundary: Boundary) -> Result<Self> {
        let x = Self::new_unchecked(spec.dim(), window, boundary)?;
        x.check_admissible(spec)?;
        Ok(x)
    }

    /// Constructor without the admissibility check. Patching uses it: the
    /// patched point is data first, and membership is a separate question.
    pub fn new_unchecked(dim: usize, window: Pattern, boundary: Boundary) -> Result<Self> {
        if window.region().dim() != dim {
            return Err(Error::DimensionMismatch(dim, window.region().dim()));
        }
        if let Boundary::Periodic { dims, data } = &boundary {
            if dims.len() != dim {
                return Err(Error::DimensionMismatch(dim, dims.len()));
            }
            let cells: u64 = dims.iter().product();
            if cells == 0 || cells as usize != data.len() {
                return Err(Error::Model(format!(
                    "periodic boundary: {} cells declared, {} provided",
                    cells,
                    data.len()
                )));
            }
        }
        if let Boundary::Tabulated { exceptions, .. } = &boundary {
            for s in exceptions.keys() {
                if s.dim() != dim {
                    return Err(Error::DimensionMismatch(dim, s.dim()));
                }
            }
        }
        Ok(FramedConfiguration { window, boundary, dim })
    }

    /// A frame with an empty window over a constant boundary.
    pub fn constant(spec: &SftSpec, symbol: u8) -> Result<Self> {
        let window = Pattern::new(FiniteRegion::empty(spec.dim()), vec![])?;
        FramedConfiguration::new(spec, window, Boundary::Constant(symbol))
    }

    pub fn window(&self) -> &Pattern {
        &self.window
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    /// Core region: sites whose value may deviate from the boundary
    /// structure (window plus tabulated exceptions).
    pub fn core(&self) -> FiniteRegion {
        let mut sites: Vec<Site> = self.window.region().sites().to_vec();
        if let Boundary::Tabulated { exceptions, .. } = &self.boundary {
            sites.extend(exceptions.keys().cloned());
        }
        FiniteRegion::new(self.dim, sites).expect("core region dims verified")
    }

    fn max_symbol(&self) -> u8 {
        self.window
            .values()
            .iter()
            .copied()
            .max()
            .unwrap_or(0)
            .max(self.boundary.max_symbol())
    }

    fn check_admissible(&self, spec: &SftSpec) -> Result<()> {
        if self.dim != spec.dim() {
            return Err(Error::DimensionMismatch(spec.dim(), self.dim));
        }
        if self.max_symbol() as usize >= spec.alphabet.len() {
            return Err(Error::AlphabetMismatch(
                self.max_symbol() as usize,
                spec.alphabet.len(),
            ));
        }
        if spec.forbidden().is_empty() {
            return Ok(());
        }
        // Translates meeting the core are checked one by one.
        let core = self.core();
        if !core.is_empty() {
            let mut window = Vec::with_capacity(spec.shape().len());
            for i in meeting_translates(&core, spec.shape()) {
                window.clear();
                for d in spec.shape().sites() {
                    window.push(self.at(i.add(d).coords()));
                }
                if spec.matches_forbidden(&window) {
                    return Err(Error::InadmissibleFrame(format!(
                        "forbidden pattern at translate {i:?}"
                    )));
                }
            }
        }
        // Far from the core the configuration is pure structure; one check
        // per structural case covers all remaining translates.
        match &self.boundary {
            Boundary::Constant(c) | Boundary::Tabulated { background: c, .. } => {
                let values = vec![*c; spec.shape().len()];
                if spec.matches_forbidden(&values) {
                    return Err(Error::InadmissibleFrame(
                        "constant background hits a forbidden pattern".into(),
                    ));
                }
            }
            Boundary::Periodic { dims, data } => {
                let mut offsets = vec![Vec::new()];
                for &d in dims.iter() {
                    let mut next = Vec::new();
                    for p in &offsets {
                        for c in 0..d as Coord {
                            let mut q = p.clone();
                            q.push(c);
                            next.push(q);
                        }
                    }
                    offsets = next;
                }
                let mut window = Vec::with_capacity(spec.shape().len());
                for o in offsets {
                    window.clear();
                    for d in spec.shape().sites() {
                        let coords: Vec<Coord> = o
                            .iter()
                            .zip(d.coords())
                            .map(|(a, b)| a + b)
                            .collect();
                        window.push(data[fold_periodic(dims, &coords)]);
                    }
                    if spec.matches_forbidden(&window) {
                        return Err(Error::InadmissibleFrame(
                            "periodic background hits a forbidden pattern".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The configuration equal to `ω` on its region and to `self` elsewhere.
    pub fn patch(&self, omega: &Pattern) -> Result<FramedConfiguration> {
        if omega.region().dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, omega.region().dim()));
        }
        let region = self.window.region().union(omega.region())?;
        let mut values = Vec::with_capacity(region.len());
        for s in region.sites() {
            match omega.value_at(s) {
                Some(v) => values.push(v),
                None => values.push(self.at(s.coords())),
            }
        }
        FramedConfiguration::new_unchecked(
            self.dim,
            Pattern::new(region, values)?,
            self.boundary.clone(),
        )
    }

    /// The window pattern restricted to `region` (reads through the frame,
    /// so any finite region works).
    pub fn pattern_on(&self, region: &FiniteRegion) -> Pattern {
        let values = region.sites().iter().map(|s| self.at(s.coords())).collect();
        Pattern { region: region.clone(), values }
    }

    /// Whether the point lies in the cylinder `[ω]`.
    pub fn in_cylinder(&self, cyl: &Cylinder) -> bool {
        cyl.base
            .region()
            .sites()
            .iter()
            .zip(cyl.base.values())
            .all(|(s, &v)| self.at(s.coords()) == v)
    }

    /// Sites where the two frames differ, when that set is finite.
    /// `Ok(None)` means the frames are comparable but differ at infinitely
    /// many sites (structures disagree as eventual functions).
    pub fn difference_sites(&self, other: &FramedConfiguration) -> Result<Option<Vec<Site>>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if !boundaries_eventually_equal(&self.boundary, &other.boundary)? {
            return Ok(None);
        }
        let core = self.core().union(&other.core())?;
        let mut diffs = Vec::new();
        for s in core.sites() {
            if self.at(s.coords()) != other.at(s.coords()) {
                diffs.push(s.clone());
            }
        }
        Ok(Some(diffs))
    }
}

impl SymbolSource for FramedConfiguration {
    fn dim(&self) -> usize {
        self.dim
    }

    fn at(&self, coords: &[Coord]) -> u8 {
        let site = Site::new(coords.to_vec());
        if let Some(v) = self.window.value_at(&site) {
            return v;
        }
        if let Boundary::Tabulated { exceptions, background } = &self.boundary {
            return exceptions.get(&site).copied().unwrap_or(*background);
        }
        self.boundary.at(coords)
    }

    fn tail(&self) -> Option<TailView<'_>> {
        let core = self.core();
        let (lo, hi) = core.hull().unwrap_or((vec![0; self.dim], vec![0; self.dim]));
        let structure = match &self.boundary {
            Boundary::Constant(c) => TailStructure::Constant(*c),
            Boundary::Tabulated { background, .. } => TailStructure::Constant(*background),
            Boundary::Periodic { dims, data } => TailStructure::Periodic { dims, data },
        };
        Some(TailView { lo, hi, structure })
    }
}

/// A view of `base` with `patch` overriding its region; avoids cloning
/// frames inside kernel denominators.
pub struct PatchedView<'a, S: SymbolSource> {
    pub base: &'a S,
    pub patch: &'a Pattern,
}

impl<'a, S: SymbolSource> SymbolSource for PatchedView<'a, S> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn at(&self, coords: &[Coord]) -> u8 {
        let site = Site::new(coords.to_vec());
        self.patch.value_at(&site).unwrap_or_else(|| self.base.at(coords))
    }

    fn tail(&self) -> Option<TailView<'_>> {
        let mut t = self.base.tail()?;
        if let Some((plo, phi)) = self.patch.region().hull() {
            for k in 0..t.lo.len() {
                t.lo[k] = t.lo[k].min(plo[k]);
                t.hi[k] = t.hi[k].max(phi[k]);
            }
        }
        Some(t)
    }
}

fn boundaries_eventually_equal(a: &Boundary, b: &Boundary) -> Result<bool> {
    use Boundary::*;
    let structural = |bd: &Boundary| match bd {
        Constant(c) => StructuralBoundary::Constant(*c),
        Tabulated { background, .. } => StructuralBoundary::Constant(*background),
        Periodic { dims, data } => {
            StructuralBoundary::Periodic { dims: dims.clone(), data: data.clone() }
        }
    };
    enum StructuralBoundary {
        Constant(u8),
        Periodic { dims: Vec<u64>, data: Vec<u8> },
    }
    let (sa, sb) = (structural(a), structural(b));
    match (sa, sb) {
        (StructuralBoundary::Constant(x), StructuralBoundary::Constant(y)) => Ok(x == y),
        (StructuralBoundary::Constant(x), StructuralBoundary::Periodic { data, .. })
        | (StructuralBoundary::Periodic { data, .. }, StructuralBoundary::Constant(x)) => {
            Ok(data.iter().all(|&v| v == x))
        }
        (
            StructuralBoundary::Periodic { dims: da, data: xa },
            StructuralBoundary::Periodic { dims: db, data: xb },
        ) => {
            if da.len() != db.len() {
                return Err(Error::DimensionMismatch(da.len(), db.len()));
            }
            let lcm_dims: Vec<u64> = da
                .iter()
                .zip(&db)
                .map(|(&p, &q)| p / gcd(p, q) * q)
                .collect();
            let cells: u64 = lcm_dims.iter().product();
            if cells > 1 << 24 {
                return Err(Error::CapExceeded { needed: cells as f64, cap: 1 << 24 });
            }
            let mut cursor = vec![0 as Coord; lcm_dims.len()];
            loop {
                if xa[fold_periodic(&da, &cursor)] != xb[fold_periodic(&db, &cursor)] {
                    return Ok(false);
                }
                let mut k = lcm_dims.len();
                loop {
                    if k == 0 {
                        return Ok(true);
                    }
                    k -= 1;
                    cursor[k] += 1;
                    if (cursor[k] as u64) < lcm_dims[k] {
                        break;
                    }
                    cursor[k] = 0;
                }
            }
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Decides `ω x_{Λ^c} ∈ X` exactly by testing forbidden patterns only on
/// translates of the shape that meet `ω`'s region. A violation that does not
/// involve the patch is the frame's own fault and reported as a distinct
/// error rather than `false`.
pub fn membership_after_patch(
    spec: &SftSpec,
    x: &FramedConfiguration,
    omega: &Pattern,
) -> Result<bool> {
    if omega.region().dim() != spec.dim() {
        return Err(Error::DimensionMismatch(spec.dim(), omega.region().dim()));
    }
    for &v in omega.values() {
        if v as usize >= spec.alphabet.len() {
            return Err(Error::AlphabetMismatch(v as usize, spec.alphabet.len()));
        }
    }
    if spec.forbidden().is_empty() || omega.region().is_empty() {
        return Ok(true);
    }
    let mut window = Vec::with_capacity(spec.shape().len());
    for i in meeting_translates(omega.region(), spec.shape()) {
        window.clear();
        let mut reads_patch = false;
        for d in spec.shape().sites() {
            let s = i.add(d);
            match omega.value_at(&s) {
                Some(v) => {
                    reads_patch = true;
                    window.push(v);
                }
                None => window.push(x.at(s.coords())),
            }
        }
        debug_assert!(reads_patch);
        if spec.matches_forbidden(&window) {
            // Same translate read from the unpatched frame: if it is already
            // forbidden there, the frame itself is out of the subshift.
            window.clear();
            for d in spec.shape().sites() {
                window.push(x.at(i.add(d).coords()));
            }
            if spec.matches_forbidden(&window) {
                return Err(Error::InadmissibleFrame(format!(
                    "frame already carries a forbidden pattern at {i:?}"
                )));
            }
            return Ok(false);
        }
    }
    Ok(true)
}

/// Hook for experimenting with non-SFT membership: the caller supplies the
/// membership decision for the patched point. Core guarantees apply to SFTs
/// only.
pub fn membership_after_patch_with_oracle(
    x: &FramedConfiguration,
    omega: &Pattern,
    oracle: impl Fn(&FramedConfiguration) -> bool,
) -> Result<bool> {
    Ok(oracle(&x.patch(omega)?))
}

/// All `ω ∈ A^Λ` with `ω x_{Λ^c} ∈ X`, in canonical pattern order. Contains
/// `x_Λ` whenever the frame is admissible.
pub fn admissible_patterns(
    spec: &SftSpec,
    x: &FramedConfiguration,
    lambda: &FiniteRegion,
) -> Result<Vec<Pattern>> {
    let mut out = Vec::new();
    for p in all_patterns(spec.alphabet.len(), lambda, spec.enumeration_cap)? {
        if membership_after_patch(spec, x, &p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// `ρ(x,y) = 2^{−n(x,y)}` where `n(x,y)` is the largest `n ≥ 0` with
/// `x_{Λ_n} = y_{Λ_n}`; zero exactly when the points coincide.
pub fn metric_distance(x: &FramedConfiguration, y: &FramedConfiguration) -> Result<f64> {
    match x.difference_sites(y)? {
        None => Err(Error::FramesNotComparable(
            "points differ at infinitely many describable sites".into(),
        )),
        Some(diffs) if diffs.is_empty() => Ok(0.0),
        Some(diffs) => {
            let m = diffs.iter().map(|s| s.norm()).min().unwrap();
            Ok(0.5f64.powi(m as i32))
        }
    }
}

/// The minimal finite `Λ` with `x_{Λ^c} = y_{Λ^c}`, i.e. the exact set of
/// sites where the points differ. `Ok(Some(empty))` reports identical
/// points; `Ok(None)` means the pair is not Gibbs related.
pub fn gibbs_related(
    x: &FramedConfiguration,
    y: &FramedConfiguration,
) -> Result<Option<FiniteRegion>> {
    match x.difference_sites(y)? {
        None => Ok(None),
        Some(diffs) => Ok(Some(FiniteRegion::new(x.dim(), diffs)?)),
    }
}

/// The generator homeomorphism `φ_{ω,η}`: swaps the block on `Λ` between `ω`
/// and `η` when the swapped point stays in the subshift, and fixes the point
/// otherwise.
pub fn generator_apply(
    spec: &SftSpec,
    omega: &Pattern,
    eta: &Pattern,
    x: &FramedConfiguration,
) -> Result<FramedConfiguration> {
    if omega.region() != eta.region() {
        return Err(Error::RegionOverlap(
            "generator patterns must share one region".into(),
        ));
    }
    let in_eta = x.in_cylinder(&Cylinder::new(eta.clone()));
    if in_eta && membership_after_patch(spec, x, omega)? {
        return x.patch(omega);
    }
    let in_omega = x.in_cylinder(&Cylinder::new(omega.clone()));
    if in_omega && membership_after_patch(spec, x, eta)? {
        return x.patch(eta);
    }
    Ok(x.clone())
}
