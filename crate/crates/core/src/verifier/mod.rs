//! Exact analysis. Everything in here is rational arithmetic over finite
//! enumerations; nothing is sampled.

mod coexistence;

pub use coexistence::{
    bipartite_components, check_feature_i_exact, coexistence_partition, collapse_analysis,
    CoexistencePartition, CollapseReport, Component, ForcedColor, SettingPartition, SettingVerdict,
    Verdict, Violation,
};

use num_traits::Zero;
use thiserror::Error;

use crate::models::{
    singlet_joint_table, InstructionMixture, InstructionSet, MicrosettingModel, Tau,
};
use crate::rational::{from_count, ratio, Ratio};
use crate::types::{SettingPair, Wing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifierError {
    #[error("model violates equal-setting agreement: {0}")]
    NonCompliant(Violation),
    #[error("ambient condition {0} is not part of the model")]
    UnknownTau(Tau),
}

/// Fraction of the nine equally likely setting pairs on which `set`
/// flashes the same color at both wings.
pub fn same_fraction(set: InstructionSet) -> Ratio {
    let same = SettingPair::all()
        .filter(|p| set.color(p.a) == set.color(p.b))
        .count();
    from_count(same as u64, 9)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationRow {
    pub set: InstructionSet,
    pub same_fraction: Ratio,
    pub pure: bool,
}

pub fn enumerate_instruction_sets() -> Vec<EnumerationRow> {
    InstructionSet::all()
        .into_iter()
        .map(|set| EnumerationRow {
            set,
            same_fraction: same_fraction(set),
            pure: set.is_pure(),
        })
        .collect()
}

/// Same-color fraction of a mixture: linear in the weights.
pub fn mixture_same_fraction(mixture: &InstructionMixture) -> Ratio {
    InstructionSet::all()
        .into_iter()
        .map(|s| mixture.weight(s) * same_fraction(s))
        .sum()
}

/// The minimum same-color fraction over all mixtures of instruction sets.
///
/// The fraction is linear in the mixture weights, and the weights range
/// over a simplex, so the minimum is attained at a vertex: a single
/// instruction set. `vertices` lists every vertex value and `minimizers`
/// the sets achieving the minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureBound {
    pub minimum: Ratio,
    pub minimizers: Vec<InstructionSet>,
    pub vertices: Vec<EnumerationRow>,
}

pub fn min_same_fraction_over_mixtures() -> MixtureBound {
    let vertices = enumerate_instruction_sets();
    let minimum = vertices
        .iter()
        .map(|r| r.same_fraction.clone())
        .min()
        .expect("eight vertices");
    let minimizers = vertices
        .iter()
        .filter(|r| r.same_fraction == minimum)
        .map(|r| r.set)
        .collect();
    MixtureBound {
        minimum,
        minimizers,
        vertices,
    }
}

/// Local instruction sets that reproduce equal-setting agreement flash the
/// same color at least `bound` of the time; the data demand `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompatibilityCertificate {
    /// Every instruction set agrees on equal settings.
    pub instruction_sets_agree_on_equal_settings: bool,
    pub bound: Ratio,
    pub target: Ratio,
    /// Overall same-color fraction of the singlet table under uniform
    /// settings.
    pub quantum_same_fraction: Ratio,
    pub gap: Ratio,
    pub incompatible: bool,
}

pub fn incompatibility_certificate() -> IncompatibilityCertificate {
    let agree = InstructionSet::all().into_iter().all(|s| {
        SettingPair::all()
            .filter(|p| p.is_same())
            .all(|p| s.color(p.a) == s.color(p.b))
    });
    let bound = min_same_fraction_over_mixtures().minimum;
    let target = ratio(1, 2);
    let table = singlet_joint_table();
    let quantum_same_fraction = SettingPair::all()
        .map(|p| table.same_color(p))
        .sum::<Ratio>()
        / Ratio::from_integer(9.into());
    let gap = &bound - &target;
    IncompatibilityCertificate {
        instruction_sets_agree_on_equal_settings: agree,
        incompatible: agree && gap > Ratio::zero() && quantum_same_fraction == target,
        bound,
        target,
        quantum_same_fraction,
        gap,
    }
}

/// The plain instruction set a compliant microsetting model acts as under
/// ambient condition `tau`.
pub fn derive_effective_instruction_set(
    m: &MicrosettingModel,
    tau: Tau,
) -> Result<InstructionSet, VerifierError> {
    if tau.0 >= m.ambient().len() {
        return Err(VerifierError::UnknownTau(tau));
    }
    check_feature_i_exact(m).map_err(VerifierError::NonCompliant)?;
    Ok(effective_set_unchecked(m, tau))
}

pub(crate) fn effective_set_unchecked(m: &MicrosettingModel, tau: Tau) -> InstructionSet {
    InstructionSet::new(crate::types::Setting::ALL.map(|s| m.respond_at(Wing::A, s, tau)))
}

/// Weight-averaged same-color fraction of the effective sets over the
/// ambient support.
pub fn exact_same_fraction(m: &MicrosettingModel) -> Result<Ratio, VerifierError> {
    check_feature_i_exact(m).map_err(VerifierError::NonCompliant)?;
    Ok(m.ambient()
        .support()
        .map(|tau| m.ambient().weight(tau) * same_fraction(effective_set_unchecked(m, tau)))
        .sum())
}
