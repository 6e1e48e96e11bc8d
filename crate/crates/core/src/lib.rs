//! Exact finite-scale checks for Gibbs measures on subshifts of finite type
//! over `Z^d` with finite alphabets.
//!
//! The library builds the objects of equilibrium statistical mechanics on
//! lattice spin systems — specification kernels, homoclinic cocycles,
//! transfer-matrix Gibbs measures, finite groupoid truncations of the
//! homoclinic relation — and evaluates the residuals that connect them:
//! DLR conditionals against kernel rows, conformality of pushforwards under
//! block swaps, kernel-dual fixed points, Capocaccia multipliers, and the
//! KMS condition for cocycle dynamics on the convolution algebra.
//!
//! All kernel arithmetic runs in log-domain; every truncated sum carries a
//! certified error bound derived from the potential's variation sequence.

pub mod cocycle;
pub mod config;
pub mod groupoid;
pub mod lattice;
pub mod measures;
pub mod model;
pub mod numeric;
pub mod potential;
pub mod report;
pub mod sampler;
pub mod specification;
pub mod subshift;
pub mod suite;
pub mod transfer;

use thiserror::Error;

/// Default ceiling on `|A|^|Λ|` pattern enumerations. Requests above the cap
/// are refused, never truncated: a truncated denominator would silently
/// corrupt kernel normalizations.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("empty region not allowed here")]
    EmptyRegion,
    #[error("box index must be at least 1")]
    ZeroBox,
    #[error("alphabet mismatch: symbol index {0} out of range {1}")]
    AlphabetMismatch(usize, usize),
    #[error("enumeration cap exceeded: needed {needed:.3e} patterns, cap is {cap}")]
    CapExceeded { needed: f64, cap: u64 },
    #[error("frame is not admissible: {0}")]
    InadmissibleFrame(String),
    #[error("points are not Gibbs related (differ at infinitely many sites)")]
    NotGibbsRelated,
    #[error("frames are not comparable: {0}")]
    FramesNotComparable(String),
    #[error("variation tail cannot be certified for this potential")]
    TailNotCertifiable,
    #[error("insufficient frame: {0}")]
    InsufficientFrame(String),
    #[error("transfer matrix is not primitive: {0}")]
    NonPrimitive(String),
    #[error("no admissible prefix rewrite exists")]
    NoAdmissiblePrefix,
    #[error("probe cylinder too coarse: {0}")]
    ProbeTooCoarse(String),
    #[error("regions overlap: {0}")]
    RegionOverlap(String),
    #[error("frozen dynamics: a full sweep passed with no movable site")]
    FrozenDynamics,
    #[error("trial budget {given} below spanning dimension {needed}")]
    TrialBudget { given: usize, needed: usize },
    #[error("groupoid mismatch: {0}")]
    GroupoidMismatch(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
