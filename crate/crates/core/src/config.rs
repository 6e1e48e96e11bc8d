//! The experiment configuration schema: model reference, potential block,
//! suite selection, regions, sampler settings, and seeds. Versioned TOML
//! with unknown keys rejected; no environment variables are consulted.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::lattice::Coord;
use crate::{Error, Result};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    SpecCheck,
    DlrCheck,
    KmsCheck,
    ConformalCheck,
    CapocacciaCheck,
    Sample,
    Transfer1d,
    All,
}

impl SuiteName {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "spec-check" => Ok(Self::SpecCheck),
            "dlr-check" => Ok(Self::DlrCheck),
            "kms-check" => Ok(Self::KmsCheck),
            "conformal-check" => Ok(Self::ConformalCheck),
            "capocaccia-check" => Ok(Self::CapocacciaCheck),
            "sample" => Ok(Self::Sample),
            "transfer-1d" => Ok(Self::Transfer1d),
            "all" => Ok(Self::All),
            other => Err(Error::Config(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    /// Model file path, resolved relative to this config's directory.
    pub model: String,
    pub suite: SuiteName,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_scale")]
    pub tolerance_scale: f64,
    /// Frame id from the model used as the boundary point.
    pub boundary: String,
    pub potential: PotentialBlock,
    #[serde(default)]
    pub regions: RegionBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kms: Option<KmsBlock>,
}

fn default_seed() -> u64 {
    0
}

fn default_scale() -> f64 {
    1.0
}

/// Potential selection: `kind` is one of `zero`, `ising` (uses `coupling`
/// and `field`), `model` (the interaction declared in the model file), or
/// `geometric-pair` (uses `amplitude` and `decay`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialBlock {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
}

impl PotentialBlock {
    pub fn zero() -> Self {
        PotentialBlock {
            kind: "zero".into(),
            coupling: None,
            field: None,
            amplitude: None,
            decay: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("coupling", self.coupling.is_some()),
            ("field", self.field.is_some()),
            ("amplitude", self.amplitude.is_some()),
            ("decay", self.decay.is_some()),
        ];
        let allowed: &[&str] = match self.kind.as_str() {
            "zero" | "model" => &[],
            "ising" => &["coupling", "field"],
            "geometric-pair" => &["amplitude", "decay"],
            other => return Err(Error::Config(format!("unknown potential kind {other:?}"))),
        };
        for (name, present) in fields {
            let expected = allowed.contains(&name);
            if present != expected {
                return Err(Error::Config(format!(
                    "potential kind {:?} {} field {name:?}",
                    self.kind,
                    if expected { "needs" } else { "does not take" }
                )));
            }
        }
        if let Some(decay) = self.decay {
            if !(0.0 < decay && decay < 1.0) {
                return Err(Error::Config("geometric decay must lie in (0,1)".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionBlock {
    /// Kernel region Λ.
    pub lambda: Vec<Vec<Coord>>,
    /// Enclosing region Δ for consistency checks.
    pub delta: Vec<Vec<Coord>>,
    /// Annulus width for DLR conditionals; defaults to the potential range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annulus_width: Option<u32>,
}

impl Default for RegionBlock {
    fn default() -> Self {
        RegionBlock {
            lambda: vec![vec![0]],
            delta: vec![vec![-1], vec![0], vec![1]],
            annulus_width: None,
        }
    }
}

/// Measure selection for the kernel-vs-measure suites: `transfer` is the
/// Gibbs measure matched to the potential, `uniform` the free transfer
/// measure (a negative control against any nonzero potential).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureBlock {
    pub kind: String,
}

impl MeasureBlock {
    pub fn is_uniform(&self) -> bool {
        self.kind == "uniform"
    }

    fn validate(&self) -> Result<()> {
        match self.kind.as_str() {
            "transfer" | "uniform" => Ok(()),
            other => Err(Error::Config(format!("unknown measure kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerBlock {
    pub dims: Vec<u64>,
    pub sweeps: u64,
    #[serde(default)]
    pub burn_in: u64,
    /// Initial (and window-defining) symbol name.
    pub init: String,
    /// Length of the axis-0 window whose patterns are recorded.
    #[serde(default = "default_window")]
    pub window: u32,
}

fn default_window() -> u32 {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KmsBlock {
    #[serde(default = "default_instances")]
    pub instances: u32,
    #[serde(default = "default_max_class")]
    pub max_class_size: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

fn default_instances() -> u32 {
    50
}

fn default_max_class() -> usize {
    8
}

fn default_beta() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("serialize: {e}")))
    }

    fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported config schema {} (expected {CONFIG_SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.tolerance_scale <= 0.0 {
            return Err(Error::Config("tolerance-scale must be positive".into()));
        }
        self.potential.validate()?;
        if let Some(measure) = &self.measure {
            measure.validate()?;
        }
        Ok(())
    }

    /// The model path resolved against the config file's directory.
    pub fn model_path(&self, config_path: &Path) -> PathBuf {
        let p = Path::new(&self.model);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            config_path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }
}
