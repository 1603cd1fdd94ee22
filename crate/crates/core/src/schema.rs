//! JSON documents describing ensembles.
//!
//! ```json
//! {"precision_bits": 256,
//!  "parts": [{"label": "hot", "levels": ["0", "1"], "temperature": {"finite": "1/ln2"}},
//!            {"levels": ["0", "1"], "temperature": "zero"}]}
//! ```
//!
//! Levels and finite temperatures are scalar literals: `p/q` is exact,
//! decimals and `sqrt`/`ln` forms are evaluated at `precision_bits`.

use serde::{Deserialize, Serialize};

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::thermal::{LevelSystem, Temperature, ThermalState};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TemperatureSpec {
    /// `"zero"` or `"infinite"`.
    Tag(String),
    Finite {
        finite: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision_bits: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub levels: Vec<String>,
    pub temperature: TemperatureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<usize>,
    pub parts: Vec<PartSpec>,
}

/// How scalars are held after parsing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMode {
    /// Keep exact literals exact.
    Rational,
    /// Convert everything to reals at this precision.
    Real(usize),
}

impl TemperatureSpec {
    fn build(&self, precision: usize) -> Result<Temperature> {
        match self {
            TemperatureSpec::Tag(t) if t == "zero" => Ok(Temperature::Zero),
            TemperatureSpec::Tag(t) if t == "infinite" => Ok(Temperature::Infinite),
            TemperatureSpec::Tag(t) => Err(Error::Schema(format!("unknown temperature tag `{t}`"))),
            TemperatureSpec::Finite { finite, precision_bits } => match Temperature::parse(finite, precision_bits.unwrap_or(precision))? {
                t @ (Temperature::Finite(_) | Temperature::LogScale { .. }) => Ok(t),
                _ => Err(Error::Schema(format!("`{finite}` is not a finite temperature"))),
            },
        }
    }

    pub fn from_temperature(t: &Temperature) -> Self {
        match t {
            Temperature::Zero => TemperatureSpec::Tag("zero".into()),
            Temperature::Infinite => TemperatureSpec::Tag("infinite".into()),
            t => TemperatureSpec::Finite { finite: t.to_string(), precision_bits: None },
        }
    }
}

impl EnsembleSpec {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn build(&self, default_precision: usize, mode: ScalarMode) -> Result<Ensemble> {
        if self.parts.is_empty() {
            return Err(Error::Schema("an ensemble needs at least one part".into()));
        }
        let mut parts = Vec::with_capacity(self.parts.len());
        for (i, p) in self.parts.iter().enumerate() {
            let prec = p.precision_bits.or(self.precision_bits).unwrap_or(default_precision);
            let levels = p.levels.iter().map(|s| Scalar::parse(s, prec)).collect::<Result<Vec<_>>>()?;
            let label = p.label.clone().unwrap_or_else(|| format!("part{i}"));
            parts.push(ThermalState::new(LevelSystem::new(label, levels)?, p.temperature.build(prec)?));
        }
        let ens = Ensemble::new(parts);
        match mode {
            ScalarMode::Rational => Ok(ens),
            ScalarMode::Real(p) => ens.into_real_mode(p),
        }
    }

    pub fn from_ensemble(ens: &Ensemble) -> Self {
        let parts = ens
            .parts()
            .iter()
            .map(|s| PartSpec {
                label: Some(s.system().label.clone()),
                levels: s.system().levels().iter().map(|l| l.to_string()).collect(),
                temperature: TemperatureSpec::from_temperature(s.temperature()),
                precision_bits: None,
            })
            .collect();
        EnsembleSpec { precision_bits: None, parts }
    }
}

/// Parses and builds in one step.
pub fn parse_ensemble(json: &str, default_precision: usize, mode: ScalarMode) -> Result<Ensemble> {
    EnsembleSpec::parse(json)?.build(default_precision, mode)
}
