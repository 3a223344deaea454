//! Simulation and exact verification for the two-detector, three-setting
//! red/green-light Bell experiment.
//!
//! Two detectors each get a setting 1, 2 or 3, chosen independently and at
//! random after a pair of particles has left the source, and each flashes
//! red or green. Quantum mechanics produces data with two features:
//! detectors with equal settings always flash the same color, and overall
//! the colors agree exactly half the time. This crate simulates the
//! experiment for quantum, local and nonlocal models, and proves exactly
//! that no local instruction-set model (including models extended over
//! ambient-dependent microsettings) has both features.
//!
//! * [`types`] and [`stats`]: settings, colors, tallies and estimators.
//! * [`models`]: the quantum reference, instruction sets, mixtures,
//!   adaptive strategies, microsetting models and the nonlocal control.
//! * [`referee`]: the seeded experiment protocol and the locality probe.
//! * [`verifier`]: exact enumeration, the mixture bound, and coexistence
//!   analysis of microsetting models.
//! * [`cli`]: model documents, reports and the command implementations
//!   behind the `redgreen` binary.
//!
//! ```
//! use redgreen::models::InstructionSet;
//! use redgreen::rational::ratio;
//! use redgreen::verifier::{min_same_fraction_over_mixtures, same_fraction};
//!
//! let ggr: InstructionSet = "GGR".parse().unwrap();
//! assert_eq!(same_fraction(ggr), ratio(5, 9));
//! assert_eq!(min_same_fraction_over_mixtures().minimum, ratio(5, 9));
//! ```

pub mod cli;
pub mod models;
pub mod rational;
pub mod referee;
pub mod rng;
pub mod stats;
pub mod types;
pub mod verifier;

pub use models::{InstructionSet, LocalModel, MicrosettingModel};
pub use referee::{run_experiment, ExperimentConfig};
pub use types::{Color, OutcomePair, RunRecord, Setting, SettingPair, Wing};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/instruction-sets.md")]
    mod instruction_sets {}
    #[doc = include_str!("../../../book/src/quantum.md")]
    mod quantum {}
    #[doc = include_str!("../../../book/src/microsettings.md")]
    mod microsettings {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
