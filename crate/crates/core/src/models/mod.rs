//! The model zoo.
//!
//! Local models implement [`LocalModel`]: a source prepares a hidden state
//! before the settings are known, and each wing then answers from its own
//! setting, the hidden state, the shared ambient condition and its own
//! randomness. The far wing's setting is not an argument, so a local model
//! has no way to read it.
//!
//! The quantum reference and the nonlocal control are joint samplers and
//! deliberately do not implement [`LocalModel`].

mod adaptive;
mod ambient;
mod instruction;
mod microsetting;
mod nonlocal;
mod quantum;

pub use adaptive::{AdaptiveStrategy, ConstantStrategy, LeastSameStrategy, ParityStrategy};
pub use ambient::{AmbientDistribution, Tau};
pub use instruction::{
    respond_instruction_set, IndependentCoins, InstructionMixture, InstructionSet,
};
pub use microsetting::{
    generate_compliant_model, microsetting_respond, two_type_model, worked_example,
    GeneratorParams, MicroId, MicroType, MicrosettingModel, WingSpec,
};
pub use nonlocal::{nonlocal_control_respond, NonlocalControl};
pub use quantum::{sample_reference, singlet_joint_table, QuantumJointTable, QuantumReference};

use thiserror::Error;

use crate::rng::Substream;
use crate::types::{Color, Setting, Wing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("wing {wing} setting {setting}: microsetting set is empty")]
    EmptyMicroSet { wing: Wing, setting: Setting },
    #[error("wing {wing}: microsetting {micro:?} declared more than once")]
    DuplicateMicro { wing: Wing, micro: String },
    #[error(
        "wing {wing} setting {setting}: no microsetting selected for ambient condition {tau:?}"
    )]
    MissingSelect {
        wing: Wing,
        setting: Setting,
        tau: String,
    },
    #[error(
        "wing {wing} setting {setting}: ambient condition {tau:?} selects {micro:?}, \
         which is not in that setting's microsetting set"
    )]
    SelectOutsideMicroSet {
        wing: Wing,
        setting: Setting,
        tau: String,
        micro: String,
    },
    #[error("wing {wing}: no color assigned to microsetting {micro:?}")]
    MissingColor { wing: Wing, micro: String },
    #[error("wing {wing}: color assigned to undeclared microsetting {micro:?}")]
    UnknownMicro { wing: Wing, micro: String },
    #[error("wing {wing} setting {setting}: color varies with the ambient condition in a stationary model")]
    NotStationary { wing: Wing, setting: Setting },
    #[error("invalid instruction set {0:?}: expected three letters over R and G")]
    InstructionSet(String),
}

/// A local hidden-variable model.
///
/// `respond` for one wing may depend on that wing's setting, the shared
/// hidden state, the shared ambient condition and wing-local randomness.
pub trait LocalModel: Sync {
    type Hidden: Send;

    /// Distribution of the ambient condition shared by both detectors.
    /// `None` means a single trivial condition.
    fn ambient(&self) -> Option<&AmbientDistribution> {
        None
    }

    /// Runs at the source, before settings exist. `ambient` is `Some` only
    /// when the experiment makes the condition visible at the source.
    fn prepare(&self, ambient: Option<Tau>, source: &mut Substream) -> Self::Hidden;

    fn respond(
        &self,
        wing: Wing,
        setting: Setting,
        hidden: &Self::Hidden,
        tau: Tau,
        local: &mut Substream,
    ) -> Color;
}
