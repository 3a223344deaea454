//! Declarative model documents.
//!
//! ```json
//! {"kind": "instruction-set", "set": "GGR"}
//! {"kind": "instruction-mixture", "weights": ["1/8", "1/8", "1/8", "1/8", "1/8", "1/8", "1/8", "1/8"]}
//! {"kind": "adaptive", "strategy": {"name": "parity", "even": "RRR", "odd": "GGG"}}
//! {"kind": "quantum-reference"}
//! {"kind": "nonlocal-control"}
//! ```
//!
//! Microsetting models list the ambient conditions with their weights and,
//! per wing, the microsettings of each setting, which microsetting each
//! condition selects, and the color of every microsetting:
//!
//! ```json
//! {
//!   "kind": "microsetting",
//!   "stationary": false,
//!   "ambient": [{"tau": "t0", "weight": "1"}],
//!   "wings": {
//!     "A": {
//!       "micro_sets": {"1": ["a1"], "2": ["a2"], "3": ["a3"]},
//!       "select": {"1": {"t0": "a1"}, "2": {"t0": "a2"}, "3": {"t0": "a3"}},
//!       "color_map": {"a1": "G", "a2": "G", "a3": "R"}
//!     },
//!     "B": { "...": "same shape" }
//!   }
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::models::{
    AmbientDistribution, ConstantStrategy, InstructionMixture, InstructionSet, LeastSameStrategy,
    MicrosettingModel, ModelError, NonlocalControl, ParityStrategy, QuantumReference, WingSpec,
};
use crate::rational::{format_ratio, parse_ratio};
use crate::types::{Color, Setting, Wing};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpecDocument {
    QuantumReference,
    InstructionSet { set: String },
    InstructionMixture { weights: Vec<String> },
    Adaptive { strategy: StrategySpec },
    Microsetting(MicrosettingSpec),
    NonlocalControl,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StrategySpec {
    Constant { set: String },
    Parity { even: String, odd: String },
    LeastSame,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrosettingSpec {
    #[serde(default)]
    pub stationary: bool,
    pub ambient: Vec<AmbientEntry>,
    pub wings: WingPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientEntry {
    pub tau: String,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WingPair {
    #[serde(rename = "A")]
    pub a: WingDocument,
    #[serde(rename = "B")]
    pub b: WingDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WingDocument {
    pub micro_sets: BTreeMap<String, Vec<String>>,
    pub select: BTreeMap<String, BTreeMap<String, String>>,
    pub color_map: BTreeMap<String, Color>,
}

/// A validated, runnable model.
#[derive(Debug, Clone)]
pub enum Model {
    QuantumReference(QuantumReference),
    InstructionSet(InstructionSet),
    Mixture(InstructionMixture),
    Adaptive(AdaptiveModel),
    Microsetting(MicrosettingModel),
    NonlocalControl(NonlocalControl),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdaptiveModel {
    Constant(ConstantStrategy),
    Parity(ParityStrategy),
    LeastSame(LeastSameStrategy),
}

fn invalid(path: impl Into<String>, message: impl std::fmt::Display) -> CliError {
    CliError::Validation {
        path: path.into(),
        message: message.to_string(),
    }
}

/// Parses a document, reporting the JSON path of the first failure.
pub fn parse_document(text: &str) -> Result<ModelSpecDocument, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value: serde_json::Value = serde_path_to_error::deserialize(de).map_err(path_error)?;
    // Tagged enums buffer their content and lose the path, so the one
    // nested kind is decoded on its own.
    if let serde_json::Value::Object(mut map) = value.clone() {
        if map.get("kind").and_then(|k| k.as_str()) == Some("microsetting") {
            map.remove("kind");
            let spec = serde_path_to_error::deserialize(serde_json::Value::Object(map))
                .map_err(path_error)?;
            return Ok(ModelSpecDocument::Microsetting(spec));
        }
    }
    serde_path_to_error::deserialize(value).map_err(path_error)
}

fn path_error<E: std::fmt::Display>(e: serde_path_to_error::Error<E>) -> CliError {
    let path = e.path().to_string();
    invalid(path, e.into_inner())
}

fn parse_set(path: &str, s: &str) -> Result<InstructionSet, CliError> {
    s.parse().map_err(|e: ModelError| invalid(path, e))
}

fn setting_key(path: &str, key: &str) -> Result<Setting, CliError> {
    key.parse().map_err(|e| invalid(format!("{path}.{key}"), e))
}

impl ModelSpecDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpecDocument::QuantumReference => "quantum-reference",
            ModelSpecDocument::InstructionSet { .. } => "instruction-set",
            ModelSpecDocument::InstructionMixture { .. } => "instruction-mixture",
            ModelSpecDocument::Adaptive { .. } => "adaptive",
            ModelSpecDocument::Microsetting(_) => "microsetting",
            ModelSpecDocument::NonlocalControl => "nonlocal-control",
        }
    }

    pub fn build(&self) -> Result<Model, CliError> {
        Ok(match self {
            ModelSpecDocument::QuantumReference => {
                Model::QuantumReference(QuantumReference::default())
            }
            ModelSpecDocument::NonlocalControl => {
                Model::NonlocalControl(NonlocalControl::default())
            }
            ModelSpecDocument::InstructionSet { set } => {
                Model::InstructionSet(parse_set("set", set)?)
            }
            ModelSpecDocument::InstructionMixture { weights } => {
                let parsed = weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| parse_ratio(w).map_err(|e| invalid(format!("weights[{i}]"), e)))
                    .collect::<Result<Vec<_>, _>>()?;
                Model::Mixture(InstructionMixture::new(parsed).map_err(|e| invalid("weights", e))?)
            }
            ModelSpecDocument::Adaptive { strategy } => Model::Adaptive(match strategy {
                StrategySpec::Constant { set } => {
                    AdaptiveModel::Constant(ConstantStrategy(parse_set("strategy.set", set)?))
                }
                StrategySpec::Parity { even, odd } => AdaptiveModel::Parity(ParityStrategy {
                    even: parse_set("strategy.even", even)?,
                    odd: parse_set("strategy.odd", odd)?,
                }),
                StrategySpec::LeastSame => AdaptiveModel::LeastSame(LeastSameStrategy),
            }),
            ModelSpecDocument::Microsetting(spec) => Model::Microsetting(spec.build()?),
        })
    }

    pub fn from_microsetting(m: &MicrosettingModel) -> Self {
        ModelSpecDocument::Microsetting(MicrosettingSpec::from_model(m))
    }
}

impl MicrosettingSpec {
    pub fn build(&self) -> Result<MicrosettingModel, CliError> {
        let entries = self
            .ambient
            .iter()
            .enumerate()
            .map(|(i, e)| {
                parse_ratio(&e.weight)
                    .map(|w| (e.tau.clone(), w))
                    .map_err(|err| invalid(format!("ambient[{i}].weight"), err))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ambient = AmbientDistribution::new(entries).map_err(|e| invalid("ambient", e))?;
        let wings = [
            self.wings.a.to_wing_spec("wings.A")?,
            self.wings.b.to_wing_spec("wings.B")?,
        ];
        MicrosettingModel::new(ambient, wings, self.stationary).map_err(|e| {
            let path = match &e {
                ModelError::EmptyMicroSet { wing, setting } => {
                    format!("wings.{wing}.micro_sets.{setting}")
                }
                ModelError::DuplicateMicro { wing, .. } => format!("wings.{wing}.micro_sets"),
                ModelError::MissingSelect { wing, setting, .. } => {
                    format!("wings.{wing}.select.{setting}")
                }
                ModelError::SelectOutsideMicroSet {
                    wing, setting, tau, ..
                } => format!("wings.{wing}.select.{setting}.{tau}"),
                ModelError::MissingColor { wing, .. } | ModelError::UnknownMicro { wing, .. } => {
                    format!("wings.{wing}.color_map")
                }
                ModelError::NotStationary { .. } => "stationary".to_string(),
                ModelError::InvalidWeights(_) => "ambient".to_string(),
                ModelError::InstructionSet(_) => String::new(),
            };
            invalid(path, e)
        })
    }

    pub fn from_model(m: &MicrosettingModel) -> Self {
        let ambient = m
            .ambient()
            .all()
            .map(|t| AmbientEntry {
                tau: m.ambient().label(t).to_string(),
                weight: format_ratio(m.ambient().weight(t)),
            })
            .collect();
        let wing = |w: Wing| WingDocument::from_wing_spec(&m.wing_spec(w));
        MicrosettingSpec {
            stationary: m.is_stationary(),
            ambient,
            wings: WingPair {
                a: wing(Wing::A),
                b: wing(Wing::B),
            },
        }
    }
}

impl WingDocument {
    fn to_wing_spec(&self, path: &str) -> Result<WingSpec, CliError> {
        let mut spec = WingSpec::default();
        for (key, micros) in &self.micro_sets {
            let s = setting_key(&format!("{path}.micro_sets"), key)?;
            spec.micro_sets[s.index()] = micros.clone();
        }
        for (key, table) in &self.select {
            let s = setting_key(&format!("{path}.select"), key)?;
            spec.select[s.index()] = table.clone();
        }
        spec.color_map = self.color_map.clone();
        Ok(spec)
    }

    fn from_wing_spec(spec: &WingSpec) -> Self {
        WingDocument {
            micro_sets: Setting::ALL
                .iter()
                .map(|s| (s.to_string(), spec.micro_sets[s.index()].clone()))
                .collect(),
            select: Setting::ALL
                .iter()
                .map(|s| (s.to_string(), spec.select[s.index()].clone()))
                .collect(),
            color_map: spec.color_map.clone(),
        }
    }
}
