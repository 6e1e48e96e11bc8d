//! The model file schema: alphabet, dimension, forbidden patterns, named
//! boundary frames, and an optional interaction block, as versioned TOML.
//! Loading then saving then loading yields identical values, and canonical
//! saves are byte-stable.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::lattice::{Coord, FiniteRegion, Site};
use crate::potential::{InteractionPotential, InteractionTerm, IsingParams};
use crate::subshift::{Alphabet, Boundary, FramedConfiguration, Pattern, SftSpec};
use crate::{Error, Result};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: u32,
    pub name: String,
    pub dimension: usize,
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<ForbiddenBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<FrameDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<InteractionBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForbiddenBlock {
    /// Site offsets of the common shape, in the order pattern values are
    /// listed.
    pub shape: Vec<Vec<Coord>>,
    pub patterns: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameException {
    pub site: Vec<Coord>,
    pub symbol: String,
}

/// A named boundary frame. `kind` selects which of the optional fields
/// apply: `constant` uses `symbol`, `periodic` uses `dims` and `data`,
/// `tabulated` uses `background` and `exceptions`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDef {
    pub id: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exceptions: Option<Vec<FrameException>>,
}

impl FrameDef {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("symbol", self.symbol.is_some()),
            ("dims", self.dims.is_some()),
            ("data", self.data.is_some()),
            ("background", self.background.is_some()),
            ("exceptions", self.exceptions.is_some()),
        ];
        let allowed: &[&str] = match self.kind.as_str() {
            "constant" => &["symbol"],
            "periodic" => &["dims", "data"],
            "tabulated" => &["background", "exceptions"],
            other => {
                return Err(Error::Model(format!(
                    "frame {:?}: unknown kind {other:?}",
                    self.id
                )))
            }
        };
        for (name, present) in fields {
            let expected = allowed.contains(&name);
            if present && !expected {
                return Err(Error::Model(format!(
                    "frame {:?}: field {name:?} does not apply to kind {:?}",
                    self.id, self.kind
                )));
            }
            if !present && expected && name != "exceptions" {
                return Err(Error::Model(format!(
                    "frame {:?}: kind {:?} needs field {name:?}",
                    self.id, self.kind
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ising: Option<IsingBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingBlock {
    pub coupling: f64,
    pub field: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDef {
    pub shape: Vec<Vec<Coord>>,
    pub coefficients: Vec<CoefficientDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientDef {
    pub pattern: Vec<String>,
    pub value: f64,
}

impl ModelFile {
    pub fn from_str(text: &str) -> Result<Self> {
        let model: ModelFile =
            toml::from_str(text).map_err(|e| Error::Model(format!("parse: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Model(format!("serialize: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.schema != MODEL_SCHEMA_VERSION {
            return Err(Error::Model(format!(
                "unsupported model schema {} (expected {MODEL_SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.dimension == 0 {
            return Err(Error::Model("dimension must be at least 1".into()));
        }
        let mut ids = std::collections::BTreeSet::new();
        for f in &self.frames {
            if !ids.insert(&f.id) {
                return Err(Error::Model(format!("duplicate frame id {:?}", f.id)));
            }
            f.validate()?;
        }
        Ok(())
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.alphabet.clone())
    }

    fn symbol(&self, alphabet: &Alphabet, name: &str) -> Result<u8> {
        alphabet
            .index_of(name)
            .ok_or_else(|| Error::Model(format!("unknown symbol {name:?}")))
    }

    /// Region from explicit offsets, plus the permutation from the listed
    /// order into canonical order.
    fn region_of(&self, sites: &[Vec<Coord>]) -> Result<(FiniteRegion, Vec<usize>)> {
        let mut parsed = Vec::with_capacity(sites.len());
        for s in sites {
            if s.len() != self.dimension {
                return Err(Error::Model(format!(
                    "site {s:?} does not have dimension {}",
                    self.dimension
                )));
            }
            parsed.push(Site::new(s.clone()));
        }
        let region = FiniteRegion::new(self.dimension, parsed.iter().cloned())?;
        if region.len() != parsed.len() {
            return Err(Error::Model("duplicate site in shape".into()));
        }
        let perm = parsed
            .iter()
            .map(|s| region.position(s).expect("just inserted"))
            .collect();
        Ok((region, perm))
    }

    fn pattern_on(
        &self,
        alphabet: &Alphabet,
        region: &FiniteRegion,
        perm: &[usize],
        names: &[String],
    ) -> Result<Pattern> {
        if names.len() != region.len() {
            return Err(Error::Model(format!(
                "pattern lists {} symbols for {} sites",
                names.len(),
                region.len()
            )));
        }
        let mut values = vec![0u8; region.len()];
        for (k, name) in names.iter().enumerate() {
            values[perm[k]] = self.symbol(alphabet, name)?;
        }
        Pattern::new(region.clone(), values)
    }

    /// The subshift this model describes.
    pub fn sft(&self) -> Result<SftSpec> {
        let alphabet = self.alphabet()?;
        match &self.forbidden {
            None => Ok(SftSpec::full_shift(alphabet, self.dimension)),
            Some(fb) => {
                let (mut region, mut perm) = self.region_of(&fb.shape)?;
                // The shape must contain the origin for translate bookkeeping;
                // shift it there if the user anchored elsewhere.
                let origin = Site::origin(self.dimension);
                if !region.contains(&origin) {
                    let anchor = region.sites()[0].clone();
                    let shifted: Vec<Vec<Coord>> = fb
                        .shape
                        .iter()
                        .map(|s| {
                            s.iter().zip(anchor.coords()).map(|(a, b)| a - b).collect()
                        })
                        .collect();
                    let (r2, p2) = self.region_of(&shifted)?;
                    region = r2;
                    perm = p2;
                }
                let mut patterns = Vec::with_capacity(fb.patterns.len());
                for p in &fb.patterns {
                    patterns.push(self.pattern_on(&alphabet, &region, &perm, p)?);
                }
                SftSpec::new(alphabet, self.dimension, region, patterns)
            }
        }
    }

    /// A named boundary frame as a checked configuration.
    pub fn frame(&self, spec: &SftSpec, id: &str) -> Result<FramedConfiguration> {
        let def = self
            .frames
            .iter()
            .find(|f| f.id == id)
            .ok_or_else(|| Error::Model(format!("unknown frame id {id:?}")))?;
        let alphabet = &spec.alphabet;
        let empty = Pattern::new(FiniteRegion::empty(self.dimension), vec![])?;
        let boundary = match def.kind.as_str() {
            "constant" => {
                Boundary::Constant(self.symbol(alphabet, def.symbol.as_ref().unwrap())?)
            }
            "periodic" => {
                let data = def.data.as_ref().unwrap();
                let mut values = Vec::with_capacity(data.len());
                for d in data {
                    values.push(self.symbol(alphabet, d)?);
                }
                Boundary::Periodic { dims: def.dims.clone().unwrap(), data: values }
            }
            "tabulated" => {
                let mut map = BTreeMap::new();
                for e in def.exceptions.as_deref().unwrap_or(&[]) {
                    if e.site.len() != self.dimension {
                        return Err(Error::Model(format!(
                            "exception site {:?} has the wrong dimension",
                            e.site
                        )));
                    }
                    map.insert(Site::new(e.site.clone()), self.symbol(alphabet, &e.symbol)?);
                }
                Boundary::Tabulated {
                    background: self.symbol(alphabet, def.background.as_ref().unwrap())?,
                    exceptions: map,
                }
            }
            _ => unreachable!("validated"),
        };
        FramedConfiguration::new(spec, empty, boundary)
    }

    /// The interaction potential, from the Ising shorthand or the explicit
    /// term list.
    pub fn interaction(&self) -> Result<InteractionPotential> {
        let alphabet = self.alphabet()?;
        let block = self
            .interaction
            .as_ref()
            .ok_or_else(|| Error::Model("model declares no interaction".into()))?;
        if let Some(ising) = &block.ising {
            if !block.terms.is_empty() {
                return Err(Error::Model(
                    "interaction must use either the ising block or terms, not both".into(),
                ));
            }
            return InteractionPotential::ising(
                IsingParams { coupling: ising.coupling, field: ising.field },
                self.dimension,
                alphabet,
            );
        }
        let mut terms = Vec::with_capacity(block.terms.len());
        for t in &block.terms {
            let (region, perm) = self.region_of(&t.shape)?;
            let size = (alphabet.len() as u64).pow(region.len() as u32) as usize;
            let mut table = vec![0.0; size];
            for c in &t.coefficients {
                let pat = self.pattern_on(&alphabet, &region, &perm, &c.pattern)?;
                let mut idx = 0usize;
                for &v in pat.values() {
                    idx = idx * alphabet.len() + v as usize;
                }
                table[idx] = c.value;
            }
            terms.push(InteractionTerm::new(region, alphabet.len(), table)?);
        }
        InteractionPotential::new(alphabet, self.dimension, terms)
    }
}

/// A ready-made golden mean model with the standard frames.
pub fn golden_mean_model() -> ModelFile {
    ModelFile {
        schema: MODEL_SCHEMA_VERSION,
        name: "golden-mean".into(),
        dimension: 1,
        alphabet: vec!["0".into(), "1".into()],
        forbidden: Some(ForbiddenBlock {
            shape: vec![vec![0], vec![1]],
            patterns: vec![vec!["1".into(), "1".into()]],
        }),
        frames: vec![FrameDef {
            id: "zeros".into(),
            kind: "constant".into(),
            symbol: Some("0".into()),
            dims: None,
            data: None,
            background: None,
            exceptions: None,
        }],
        interaction: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = r#"
schema = 1
name = "golden-mean"
dimension = 1
alphabet = ["0", "1"]

[forbidden]
shape = [[0], [1]]
patterns = [["1", "1"]]

[[frames]]
id = "zeros"
kind = "constant"
symbol = "0"

[[frames]]
id = "alt"
kind = "periodic"
dims = [2]
data = ["0", "1"]
"#;

    #[test]
    fn golden_mean_round_trip() {
        let model = ModelFile::from_str(GOLDEN).unwrap();
        let text = model.to_toml().unwrap();
        let again = ModelFile::from_str(&text).unwrap();
        assert_eq!(model, again);
        // Canonical saves are byte-stable.
        assert_eq!(text, again.to_toml().unwrap());
        let sft = model.sft().unwrap();
        assert_eq!(sft.forbidden().len(), 1);
        let frame = model.frame(&sft, "alt").unwrap();
        use crate::subshift::SymbolSource;
        assert_eq!(frame.at(&[0]), 0);
        assert_eq!(frame.at(&[1]), 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = GOLDEN.replace("name = \"golden-mean\"", "name = \"x\"\nbogus = 3");
        assert!(matches!(ModelFile::from_str(&text), Err(Error::Model(_))));
    }

    #[test]
    fn schema_version_is_checked() {
        let text = GOLDEN.replace("schema = 1", "schema = 99");
        assert!(matches!(ModelFile::from_str(&text), Err(Error::Model(_))));
    }

    #[test]
    fn ising_shorthand_and_terms() {
        let text = r#"
schema = 1
name = "spins"
dimension = 1
alphabet = ["+", "-"]

[interaction]
ising = { coupling = 0.5, field = 0.25 }
"#;
        let model = ModelFile::from_str(text).unwrap();
        let phi = model.interaction().unwrap();
        assert_eq!(phi.terms().len(), 2);

        let explicit = r#"
schema = 1
name = "pair"
dimension = 1
alphabet = ["+", "-"]

[[interaction.terms]]
shape = [[0], [1]]
coefficients = [
  { pattern = ["+", "+"], value = -0.5 },
  { pattern = ["-", "-"], value = -0.5 },
  { pattern = ["+", "-"], value = 0.5 },
  { pattern = ["-", "+"], value = 0.5 },
]
"#;
        let model = ModelFile::from_str(explicit).unwrap();
        let phi = model.interaction().unwrap();
        assert_eq!(phi.terms().len(), 1);
        // Same Hamiltonian as the Ising pair term at J = 0.5, h = 0.
        let spec = SftSpec::full_shift(Alphabet::spins(), 1);
        let x = FramedConfiguration::constant(&spec, 0).unwrap();
        let lam = FiniteRegion::singleton(Site::new(vec![0]));
        let h = phi.hamiltonian(&lam, &x).unwrap();
        assert!((h + 1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_symbols_are_reported() {
        let text = GOLDEN.replace("patterns = [[\"1\", \"1\"]]", "patterns = [[\"1\", \"2\"]]");
        let model = ModelFile::from_str(&text).unwrap();
        assert!(matches!(model.sft(), Err(Error::Model(_))));
    }

    #[test]
    fn tabulated_frame_parses() {
        let text = r#"
schema = 1
name = "spiked"
dimension = 1
alphabet = ["0", "1"]

[[frames]]
id = "spiked"
kind = "tabulated"
background = "0"
exceptions = [{ site = [3], symbol = "1" }]
"#;
        let model = ModelFile::from_str(text).unwrap();
        let sft = model.sft().unwrap();
        let frame = model.frame(&sft, "spiked").unwrap();
        use crate::subshift::SymbolSource;
        assert_eq!(frame.at(&[3]), 1);
        assert_eq!(frame.at(&[2]), 0);
        let round = ModelFile::from_str(&model.to_toml().unwrap()).unwrap();
        assert_eq!(model, round);
    }
}
