//! JSON report documents. Exact values are always `"p/q"` strings;
//! estimates are decimals with their sample size.

use serde::{Serialize, Serializer};

use crate::models::{InstructionSet, MicroType};
use crate::rational::{format_ratio, Ratio};
use crate::referee::LocalityWitness;
use crate::stats::{self, Conditional, StatsError, TallyTable};
use crate::types::{Color, Setting, SettingPair};
use crate::verifier::{
    CollapseReport, ForcedColor, IncompatibilityCertificate, MixtureBound, SettingVerdict,
    Violation,
};

use super::spec::ModelSpecDocument;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// z for a two-sided 95% Wilson interval.
pub const WILSON_Z: f64 = 1.959963984540054;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exact(pub Ratio);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(&self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaybeExact(pub Option<Ratio>);

impl Serialize for MaybeExact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.0 {
            Some(r) => s.serialize_str(&format_ratio(r)),
            None => s.serialize_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub z: f64,
    pub lower: f64,
    pub upper: f64,
}

/// A proportion observed in the data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: u64,
    pub samples: u64,
    pub exact: MaybeExact,
    pub estimate: Option<Estimate>,
    pub wilson: Option<Interval>,
}

impl Proportion {
    pub fn new(successes: u64, samples: u64) -> Self {
        if samples == 0 {
            return Proportion {
                successes,
                samples,
                exact: MaybeExact(None),
                estimate: None,
                wilson: None,
            };
        }
        let (lower, upper) =
            stats::wilson_interval(successes, samples, WILSON_Z).expect("samples > 0");
        Proportion {
            successes,
            samples,
            exact: MaybeExact(Some(crate::rational::from_count(successes, samples))),
            estimate: Some(Estimate {
                value: successes as f64 / samples as f64,
                samples,
            }),
            wilson: Some(Interval {
                z: WILSON_Z,
                lower,
                upper,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Statistics {
    pub trials: u64,
    pub feature_i: Proportion,
    pub same_color: Proportion,
    /// `per_pair[a - 1][b - 1]`: same-color fraction given the setting pair.
    pub per_pair: Vec<Vec<MaybeExact>>,
    pub pair_counts: Vec<Vec<u64>>,
}

impl Statistics {
    pub fn from_tally(t: &TallyTable) -> Result<Self, StatsError> {
        if t.total() == 0 {
            return Err(StatsError::EmptyData);
        }
        let (same_eq, n_eq) = t.equal_setting_counts();
        let table = stats::per_pair_same_table(t);
        Ok(Statistics {
            trials: t.total(),
            feature_i: Proportion::new(same_eq, n_eq),
            same_color: Proportion::new(t.same_count(), t.total()),
            per_pair: table
                .iter()
                .map(|row| row.iter().map(|c| MaybeExact(c.value().cloned())).collect())
                .collect(),
            pair_counts: Setting::ALL
                .iter()
                .map(|a| {
                    Setting::ALL
                        .iter()
                        .map(|b| t.pair_count(SettingPair::new(*a, *b)))
                        .collect()
                })
                .collect(),
        })
    }

    pub fn per_pair_conditional(&self, a: Setting, b: Setting) -> Conditional {
        match &self.per_pair[a.index()][b.index()].0 {
            Some(r) => Conditional::Defined(r.clone()),
            None => Conditional::Undefined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateConfig {
    pub model: ModelSpecDocument,
    pub trials: u64,
    pub seed: u64,
    pub ambient_at_source: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub command: &'static str,
    pub version: &'static str,
    pub config: SimulateConfig,
    pub statistics: Statistics,
    /// Exact expectation, when the model kind admits one.
    pub exact_same_fraction: Option<Exact>,
    pub locality: Option<LocalityDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessDoc {
    pub setting: Setting,
    pub tau: String,
    pub micro_a: String,
    pub micro_b: String,
    pub color_a: Color,
    pub color_b: Color,
}

impl From<&Violation> for WitnessDoc {
    fn from(v: &Violation) -> Self {
        WitnessDoc {
            setting: v.setting,
            tau: v.tau_label.clone(),
            micro_a: v.micro_a.clone(),
            micro_b: v.micro_b.clone(),
            color_a: v.color_a,
            color_b: v.color_b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentDoc {
    pub micro_a: Vec<String>,
    pub micro_b: Vec<String>,
    pub color: Option<Color>,
    #[serde(rename = "type")]
    pub micro_type: Option<MicroType>,
    pub conflict: Option<WitnessDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SettingCollapseDoc {
    pub setting: Setting,
    pub verdict: &'static str,
    pub color: Option<Color>,
    pub type_i_color: Option<Color>,
    pub components: Vec<ComponentDoc>,
    pub witness: Option<WitnessDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EffectiveDoc {
    pub tau: String,
    pub set: InstructionSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedSetDoc {
    pub set: InstructionSet,
    pub weight: Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollapseDoc {
    pub verdict: String,
    pub settings: Vec<SettingCollapseDoc>,
    pub effective_by_tau: Vec<EffectiveDoc>,
    pub effective_distribution: Vec<WeightedSetDoc>,
}

impl From<&CollapseReport> for CollapseDoc {
    fn from(r: &CollapseReport) -> Self {
        let settings = r
            .per_setting
            .iter()
            .zip(&r.partition.settings)
            .map(|((setting, verdict), part)| {
                let (name, color, type_i_color, witness) = match verdict {
                    SettingVerdict::FullyCollapsed { color } => {
                        ("fully-collapsed", Some(*color), Some(*color), None)
                    }
                    SettingVerdict::TwoType { type_i, .. } => {
                        ("two-type", None, Some(*type_i), None)
                    }
                    SettingVerdict::Violation(v) => {
                        ("violation", None, None, Some(WitnessDoc::from(v)))
                    }
                };
                SettingCollapseDoc {
                    setting: *setting,
                    verdict: name,
                    color,
                    type_i_color,
                    components: part
                        .components
                        .iter()
                        .map(|c| ComponentDoc {
                            micro_a: c.micro_a.clone(),
                            micro_b: c.micro_b.clone(),
                            color: match c.forced {
                                ForcedColor::Color(col) => Some(col),
                                ForcedColor::Conflict(_) => None,
                            },
                            micro_type: c.micro_type,
                            conflict: match &c.forced {
                                ForcedColor::Conflict(v) => Some(v.into()),
                                ForcedColor::Color(_) => None,
                            },
                        })
                        .collect(),
                    witness,
                }
            })
            .collect();
        CollapseDoc {
            verdict: r.verdict.to_string(),
            settings,
            effective_by_tau: r
                .effective_by_tau
                .iter()
                .map(|(tau, set)| EffectiveDoc {
                    tau: tau.clone(),
                    set: *set,
                })
                .collect(),
            effective_distribution: r
                .effective_distribution
                .iter()
                .map(|(set, w)| WeightedSetDoc {
                    set: *set,
                    weight: Exact(w.clone()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplianceDoc {
    pub compliant: bool,
    pub witness: Option<WitnessDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub version: &'static str,
    pub model: ModelSpecDocument,
    pub compliance: ComplianceDoc,
    pub exact_same_fraction: Option<Exact>,
    pub bound: Exact,
    pub meets_bound: Option<bool>,
    pub collapse: Option<CollapseDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationRowDoc {
    pub set: InstructionSet,
    pub same_fraction: Exact,
    pub pure: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundDoc {
    pub minimum: Exact,
    pub minimizers: Vec<InstructionSet>,
}

impl From<&MixtureBound> for BoundDoc {
    fn from(b: &MixtureBound) -> Self {
        BoundDoc {
            minimum: Exact(b.minimum.clone()),
            minimizers: b.minimizers.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateDoc {
    pub instruction_sets_agree_on_equal_settings: bool,
    pub bound: Exact,
    pub target: Exact,
    pub quantum_same_fraction: Exact,
    pub gap: Exact,
    pub incompatible: bool,
}

impl From<&IncompatibilityCertificate> for CertificateDoc {
    fn from(c: &IncompatibilityCertificate) -> Self {
        CertificateDoc {
            instruction_sets_agree_on_equal_settings: c.instruction_sets_agree_on_equal_settings,
            bound: Exact(c.bound.clone()),
            target: Exact(c.target.clone()),
            quantum_same_fraction: Exact(c.quantum_same_fraction.clone()),
            gap: Exact(c.gap.clone()),
            incompatible: c.incompatible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerateReport {
    pub command: &'static str,
    pub version: &'static str,
    pub instruction_sets: Vec<EnumerationRowDoc>,
    pub bound: BoundDoc,
    pub certificate: CertificateDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub command: &'static str,
    pub version: &'static str,
    pub statistics: Statistics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalityDoc {
    pub passed: bool,
    pub witness: Option<LocalityWitness>,
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}
