//! `Z^d` geometry: sites, sup-norm boxes, finite regions in canonical
//! lexicographic order, translations, and the enlarged-window construction
//! used to localize subshift membership checks.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

pub type Coord = i64;

/// A lattice site in `Z^d`. Ordering is lexicographic on coordinates, which
/// fixes the canonical site order used everywhere downstream.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(Vec<Coord>);

impl Site {
    pub fn new(coords: Vec<Coord>) -> Self {
        Site(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.0
    }

    /// Sup norm `max_l |i_l|`.
    pub fn norm(&self) -> Coord {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Site) -> Site {
        Site(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Site) -> Site {
        Site(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Site {
        Site(self.0.iter().map(|c| -c).collect())
    }

    pub fn origin(dim: usize) -> Site {
        Site(vec![0; dim])
    }

    /// Sup distance to a finite set of sites.
    pub fn distance_to(&self, sites: &[Site]) -> Coord {
        sites
            .iter()
            .map(|s| self.sub(s).norm())
            .min()
            .unwrap_or(Coord::MAX)
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// Convenience constructor for one-dimensional sites.
pub fn site1(i: Coord) -> Site {
    Site::new(vec![i])
}

/// Convenience constructor for two-dimensional sites.
pub fn site2(i: Coord, j: Coord) -> Site {
    Site::new(vec![i, j])
}

/// A finite set of sites of a fixed dimension, kept sorted in canonical
/// lexicographic order with no duplicates. May be empty (the degenerate
/// region used to report an empty difference set); operations that require
/// nonempty input check for it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteRegion {
    dim: usize,
    sites: Vec<Site>,
}

impl FiniteRegion {
    pub fn new(dim: usize, sites: impl IntoIterator<Item = Site>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for s in sites {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch(dim, s.dim()));
            }
            set.insert(s);
        }
        Ok(FiniteRegion { dim, sites: set.into_iter().collect() })
    }

    pub fn empty(dim: usize) -> Self {
        FiniteRegion { dim, sites: Vec::new() }
    }

    pub fn singleton(site: Site) -> Self {
        FiniteRegion { dim: site.dim(), sites: vec![site] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn contains(&self, site: &Site) -> bool {
        self.position(site).is_some()
    }

    /// Index of a site in canonical order.
    pub fn position(&self, site: &Site) -> Option<usize> {
        self.sites.binary_search(site).ok()
    }

    pub fn is_subset_of(&self, other: &FiniteRegion) -> bool {
        self.sites.iter().all(|s| other.contains(s))
    }

    pub fn intersects(&self, other: &FiniteRegion) -> bool {
        self.sites.iter().any(|s| other.contains(s))
    }

    pub fn union(&self, other: &FiniteRegion) -> Result<FiniteRegion> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        FiniteRegion::new(self.dim, self.sites.iter().chain(&other.sites).cloned())
    }

    pub fn difference(&self, other: &FiniteRegion) -> FiniteRegion {
        FiniteRegion {
            dim: self.dim,
            sites: self.sites.iter().filter(|s| !other.contains(s)).cloned().collect(),
        }
    }

    /// Sup diameter: max over pairs of the sup distance. 0 for 0/1 sites.
    pub fn diameter(&self) -> Coord {
        let mut d = 0;
        for a in &self.sites {
            for b in &self.sites {
                d = d.max(a.sub(b).norm());
            }
        }
        d
    }

    /// Max sup norm over sites; 0 when empty.
    pub fn max_norm(&self) -> Coord {
        self.sites.iter().map(|s| s.norm()).max().unwrap_or(0)
    }

    /// Componentwise bounding box `(min, max)`; `None` when empty.
    pub fn hull(&self) -> Option<(Vec<Coord>, Vec<Coord>)> {
        if self.sites.is_empty() {
            return None;
        }
        let mut lo = self.sites[0].coords().to_vec();
        let mut hi = lo.clone();
        for s in &self.sites {
            for (k, &c) in s.coords().iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        Some((lo, hi))
    }
}

impl fmt::Debug for FiniteRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.sites)
    }
}

/// The box `Λ_n = {i ∈ Z^d : ‖i‖ < n}`, with `|Λ_n| = (2n−1)^d`.
/// `n = 0` is rejected: the empty region is not a valid volume.
pub fn box_region(n: u32, dim: usize) -> Result<FiniteRegion> {
    if n == 0 {
        return Err(Error::ZeroBox);
    }
    let r = (n - 1) as Coord;
    let mut sites = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::new();
        for prefix in &sites {
            for c in -r..=r {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
            }
        }
        sites = next;
    }
    FiniteRegion::new(dim, sites.into_iter().map(Site::new))
}

/// `Λ̃ = Λ ∪ ⋃ { i+Δ : (i+Δ) ∩ Λ ≠ ∅ }`: every translate of the shape `Δ`
/// that meets `Λ` lies entirely inside the enlarged window.
pub fn enlarge_window(lambda: &FiniteRegion, delta: &FiniteRegion) -> Result<FiniteRegion> {
    if lambda.dim() != delta.dim() {
        return Err(Error::DimensionMismatch(lambda.dim(), delta.dim()));
    }
    if lambda.is_empty() || delta.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut sites: BTreeSet<Site> = lambda.sites().iter().cloned().collect();
    // (i+Δ) ∩ Λ ≠ ∅ exactly when i = a − δ for some a ∈ Λ, δ ∈ Δ.
    for a in lambda.sites() {
        for d0 in delta.sites() {
            let i = a.sub(d0);
            for d in delta.sites() {
                sites.insert(i.add(d));
            }
        }
    }
    FiniteRegion::new(lambda.dim(), sites)
}

/// All offsets `i` whose translate `i+Δ` meets `Λ`.
pub fn meeting_translates(lambda: &FiniteRegion, delta: &FiniteRegion) -> Vec<Site> {
    let mut offs = BTreeSet::new();
    for a in lambda.sites() {
        for d in delta.sites() {
            offs.insert(a.sub(d));
        }
    }
    offs.into_iter().collect()
}

/// All sites at sup distance at most `radius` from a nonempty region.
pub fn sites_within(region: &FiniteRegion, radius: Coord) -> Vec<Site> {
    let (lo, hi) = region.hull().expect("sites_within needs a nonempty region");
    let dim = region.dim();
    let mut out = Vec::new();
    let mut cursor: Vec<Coord> = lo.iter().map(|c| c - radius).collect();
    let hi_ext: Vec<Coord> = hi.iter().map(|c| c + radius).collect();
    loop {
        let s = Site::new(cursor.clone());
        if s.distance_to(region.sites()) <= radius {
            out.push(s);
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cursor[k] += 1;
            if cursor[k] <= hi_ext[k] {
                break;
            }
            cursor[k] = lo[k] - radius;
        }
    }
}

/// `{ i+j : i ∈ R }` in canonical order.
pub fn translate(region: &FiniteRegion, j: &Site) -> Result<FiniteRegion> {
    if region.dim() != j.dim() {
        return Err(Error::DimensionMismatch(region.dim(), j.dim()));
    }
    FiniteRegion::new(region.dim(), region.sites().iter().map(|s| s.add(j)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_n1_d2_is_origin() {
        let b = box_region(1, 2).unwrap();
        assert_eq!(b.sites(), &[site2(0, 0)]);
    }

    #[test]
    fn box_n2_d1_is_three_sites() {
        let b = box_region(2, 1).unwrap();
        assert_eq!(b.sites(), &[site1(-1), site1(0), site1(1)]);
    }

    #[test]
    fn box_n2_d2_is_three_by_three() {
        let b = box_region(2, 2).unwrap();
        assert_eq!(b.len(), 9);
        assert!(b.contains(&site2(-1, 1)));
        assert!(!b.contains(&site2(2, 0)));
    }

    #[test]
    fn box_rejects_zero() {
        assert!(box_region(0, 1).is_err());
    }

    #[test]
    fn boxes_nest() {
        for d in 1..=2 {
            for n in 1..5u32 {
                let a = box_region(n, d).unwrap();
                let b = box_region(n + 1, d).unwrap();
                assert!(a.is_subset_of(&b));
            }
        }
    }

    #[test]
    fn enlarge_window_d1_pair_shape() {
        // Λ = {0}, Δ = {0,1}: translates meeting Λ are at i ∈ {−1,0},
        // so Λ̃ = {−1,0} ∪ {0,1} = {−1,0,1}.
        let lambda = FiniteRegion::singleton(site1(0));
        let delta = FiniteRegion::new(1, [site1(0), site1(1)]).unwrap();
        let e = enlarge_window(&lambda, &delta).unwrap();
        assert_eq!(e.sites(), &[site1(-1), site1(0), site1(1)]);
    }

    #[test]
    fn enlarge_window_single_site_shape_is_identity() {
        let lambda = box_region(2, 2).unwrap();
        let delta = FiniteRegion::singleton(site2(0, 0));
        assert_eq!(enlarge_window(&lambda, &delta).unwrap(), lambda);
    }

    /// Independent brute-force enumeration of the translates that meet Λ,
    /// scanned over a generous coordinate range.
    fn enlarge_by_scan(lambda: &FiniteRegion, delta: &FiniteRegion) -> FiniteRegion {
        let reach = lambda.max_norm() + delta.max_norm() + delta.diameter() + 2;
        let dim = lambda.dim();
        let mut sites: BTreeSet<Site> = lambda.sites().iter().cloned().collect();
        let mut cursor = vec![-reach; dim];
        loop {
            let i = Site::new(cursor.clone());
            let translated = translate(delta, &i).unwrap();
            if translated.intersects(lambda) {
                sites.extend(translated.sites().iter().cloned());
            }
            let mut k = dim;
            loop {
                if k == 0 {
                    return FiniteRegion::new(dim, sites).unwrap();
                }
                k -= 1;
                cursor[k] += 1;
                if cursor[k] <= reach {
                    break;
                }
                cursor[k] = -reach;
            }
        }
    }

    #[test]
    fn enlarge_window_d2_plus_shape_matches_scan_oracle() {
        let lambda = FiniteRegion::singleton(site2(0, 0));
        let delta =
            FiniteRegion::new(2, [site2(0, 0), site2(1, 0), site2(0, 1)]).unwrap();
        let fast = enlarge_window(&lambda, &delta).unwrap();
        let slow = enlarge_by_scan(&lambda, &delta);
        assert_eq!(fast, slow);
        assert!(lambda.is_subset_of(&fast));
    }

    #[test]
    fn enlarge_window_monotone_in_lambda() {
        let small = FiniteRegion::singleton(site1(0));
        let big = FiniteRegion::new(1, [site1(0), site1(1)]).unwrap();
        let delta = FiniteRegion::new(1, [site1(0), site1(1)]).unwrap();
        let e_small = enlarge_window(&small, &delta).unwrap();
        let e_big = enlarge_window(&big, &delta).unwrap();
        assert!(e_small.is_subset_of(&e_big));
    }

    #[test]
    fn translate_examples() {
        let r = FiniteRegion::new(1, [site1(0), site1(1)]).unwrap();
        assert_eq!(translate(&r, &site1(2)).unwrap().sites(), &[site1(2), site1(3)]);
        assert_eq!(translate(&r, &site1(0)).unwrap(), r);
        let p = FiniteRegion::singleton(site2(0, 0));
        assert_eq!(
            translate(&p, &site2(1, -1)).unwrap().sites(),
            &[site2(1, -1)]
        );
    }

    #[test]
    fn translate_round_trip() {
        let r = box_region(3, 2).unwrap();
        let j = site2(5, -7);
        let back = translate(&translate(&r, &j).unwrap(), &j.neg()).unwrap();
        assert_eq!(back, r);
    }
}
