//! JSON experiment configuration.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{FunctionFamily, PeriodicFunction, UniformGrid, DEFAULT_GRID_POINTS};
use crate::orlicz::{NormKind, OrliczSpace};
use crate::psi::{psi_beta, PsiPair, PsiSequence};
use crate::weights::Weight;
use crate::young::YoungFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpaceSpec {
    pub young: String,
    pub weight: String,
    pub grid_points: usize,
    pub norm: NormKind,
}

impl Default for SpaceSpec {
    fn default() -> Self {
        Self {
            young: "power 2".into(),
            weight: "const".into(),
            grid_points: DEFAULT_GRID_POINTS,
            norm: NormKind::Luxemburg,
        }
    }
}

impl SpaceSpec {
    pub fn build(&self) -> Result<OrliczSpace> {
        let young = YoungFunction::from_str(&self.young)
            .map_err(|e| Error::config("/space/young", e.to_string()))?;
        let weight = Weight::from_str(&self.weight)
            .map_err(|e| Error::config("/space/weight", e.to_string()))?;
        if self.grid_points < 16 {
            return Err(Error::config("/space/grid_points", "need at least 16 points"));
        }
        Ok(OrliczSpace::new(young, weight, UniformGrid::new(self.grid_points))?
            .with_norm_kind(self.norm))
    }
}

/// Test function: a named family or explicit coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0_half: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<(f64, f64)>>,
}

/// Resolved function source.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSource {
    Fixed(PeriodicFunction),
    /// `cos nx` at each order `n`
    Harmonics,
    /// Seeded random polynomial of each order
    Random,
}

impl FunctionSpec {
    pub fn family(name: impl Into<String>) -> Self {
        Self {
            family: Some(name.into()),
            ..Default::default()
        }
    }

    pub fn source(&self) -> Result<FunctionSource> {
        match (&self.family, &self.coeffs) {
            (Some(_), Some(_)) => Err(Error::config(
                "/function",
                "give either a family or coefficients, not both",
            )),
            (None, None) => Err(Error::config("/function", "missing family or coefficients")),
            (None, Some(c)) => Ok(FunctionSource::Fixed(PeriodicFunction::new(
                self.a0_half.unwrap_or(0.0),
                c.clone(),
            ))),
            (Some(name), None) => match name.trim() {
                "harmonic" => Ok(FunctionSource::Harmonics),
                "random" => Ok(FunctionSource::Random),
                other => {
                    let fam = FunctionFamily::from_str(other)
                        .map_err(|e| Error::config("/function/family", e.to_string()))?;
                    let mut f = fam.build();
                    if let Some(a) = self.a0_half {
                        f.a0_half = a;
                    }
                    Ok(FunctionSource::Fixed(f))
                }
            },
        }
    }

    /// The fixed function, rejecting per-order corpora.
    pub fn fixed(&self) -> Result<PeriodicFunction> {
        match self.source()? {
            FunctionSource::Fixed(f) => Ok(f),
            _ => Err(Error::config(
                "/function/family",
                "this theorem needs a single fixed function",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSpec {
    pub family: String,
    #[serde(default)]
    pub beta: f64,
    /// Constant term of ψ-integrals.
    #[serde(default)]
    pub a0: f64,
}

impl Default for PsiSpec {
    fn default() -> Self {
        Self {
            family: "power 1".into(),
            beta: 0.0,
            a0: 0.0,
        }
    }
}

impl PsiSpec {
    pub fn sequence(&self) -> Result<PsiSequence> {
        PsiSequence::from_str(&self.family)
            .map_err(|e| Error::config("/psi/family", e.to_string()))
    }

    pub fn pair(&self) -> Result<PsiPair> {
        if !self.beta.is_finite() {
            return Err(Error::config("/psi/beta", "beta must be finite"));
        }
        Ok(psi_beta(self.sequence()?, self.beta))
    }
}

/// Which inequality a run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "bernstein_15")]
    Bernstein15,
    #[serde(rename = "lemmaA_8")]
    LemmaA8,
    #[serde(rename = "theoremA_5_6_7")]
    TheoremA567,
    #[serde(rename = "direct_16")]
    Direct16,
    #[serde(rename = "corollary_16s")]
    Corollary16s,
    #[serde(rename = "inverse_21")]
    Inverse21,
    #[serde(rename = "inverse_41_3")]
    Inverse413,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Bernstein15,
        TheoremId::LemmaA8,
        TheoremId::TheoremA567,
        TheoremId::Direct16,
        TheoremId::Corollary16s,
        TheoremId::Inverse21,
        TheoremId::Inverse413,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Bernstein15 => "bernstein_15",
            TheoremId::LemmaA8 => "lemmaA_8",
            TheoremId::TheoremA567 => "theoremA_5_6_7",
            TheoremId::Direct16 => "direct_16",
            TheoremId::Corollary16s => "corollary_16s",
            TheoremId::Inverse21 => "inverse_21",
            TheoremId::Inverse413 => "inverse_41_3",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown theorem id '{s}'")))
    }
}

/// Whether failed ψ-class hypotheses abort the run or are only recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisPolicy {
    #[default]
    Enforce,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Largest log-log ratio slope that counts as bounded.
    pub trend_slope: f64,
    /// `E_n(f^ψ)` below this marks a direct-theorem row degenerate.
    pub degenerate_en: f64,
    /// Right sides below this mark a row degenerate.
    pub degenerate_rhs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trend_slope: 0.05,
            degenerate_en: 1e-10,
            degenerate_rhs: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub theorem_id: TheoremId,
    pub n_range: [usize; 2],
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub policy: HypothesisPolicy,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_r() -> usize {
    1
}

impl RunSpec {
    pub fn new(theorem_id: TheoremId, n_range: [usize; 2]) -> Self {
        Self {
            theorem_id,
            n_range,
            r: 1,
            seed: 0,
            policy: HypothesisPolicy::Enforce,
            tolerances: Tolerances::default(),
        }
    }

    pub fn ns(&self) -> impl Iterator<Item = usize> {
        self.n_range[0]..=self.n_range[1]
    }
}

/// A full experiment: the config file minus anything run-irrelevant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    #[serde(default)]
    pub space: SpaceSpec,
    pub function: FunctionSpec,
    #[serde(default)]
    pub psi: PsiSpec,
    pub run: RunSpec,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.run.n_range;
        if a > b {
            return Err(Error::config("/run/n_range", "start exceeds end"));
        }
        let t = &self.run.tolerances;
        for (name, v) in [
            ("trend_slope", t.trend_slope),
            ("degenerate_en", t.degenerate_en),
            ("degenerate_rhs", t.degenerate_rhs),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(
                    format!("/run/tolerances/{name}"),
                    "tolerances must be positive",
                ));
            }
        }
        self.function.source()?;
        self.psi.pair()?;
        YoungFunction::from_str(&self.space.young)
            .map_err(|e| Error::config("/space/young", e.to_string()))?;
        Weight::from_str(&self.space.weight)
            .map_err(|e| Error::config("/space/weight", e.to_string()))?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        ConfigFile::from_json(text)?.experiment()
    }

    pub fn load(path: &Path) -> Result<Self> {
        ConfigFile::load(path)?.experiment()
    }
}

/// The config file as written; sections not needed by a command may be absent.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub space: SpaceSpec,
    #[serde(default)]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub psi: Option<PsiSpec>,
    #[serde(default)]
    pub run: Option<RunSpec>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let pointer = if path == "." {
                "/".to_string()
            } else {
                format!("/{}", path.replace('.', "/"))
            };
            Error::config(pointer, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn experiment(self) -> Result<Experiment> {
        let exp = Experiment {
            space: self.space,
            function: self
                .function
                .ok_or_else(|| Error::config("/function", "missing section"))?,
            psi: self.psi.unwrap_or_default(),
            run: self.run.ok_or_else(|| Error::config("/run", "missing section"))?,
        };
        exp.validate()?;
        Ok(exp)
    }
}
