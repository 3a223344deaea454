//! The experiment protocol.
//!
//! Every trial follows the same causal order: the source prepares the
//! hidden state, the ambient condition is drawn, then each wing's setting
//! is drawn independently and uniformly, and finally each wing responds.
//! Each step draws from its own substream keyed by (trial, role), so a
//! trial's outcome does not depend on which worker evaluates it.

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::models::{
    AdaptiveStrategy, AmbientDistribution, InstructionMixture, LocalModel, ModelError,
    NonlocalControl, QuantumReference, Tau,
};
use crate::rng::{RandomnessStream, Role, Substream, TrialStreams};
use crate::types::{Color, OutcomePair, RunRecord, Setting, SettingPair, Wing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefereeError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("trial {trial}: {source}")]
    Model {
        trial: u64,
        #[source]
        source: ModelError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub trials: u64,
    pub seed: u64,
    /// Draw the ambient condition before the source prepares the hidden
    /// state and let the source see it.
    pub ambient_at_source: bool,
}

impl ExperimentConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            trials,
            seed,
            ambient_at_source: false,
        }
    }
}

/// What the referee needs from a model to run one trial.
///
/// Every [`LocalModel`] is an `Experiment` whose outcome is assembled from
/// two independent wing responses. The quantum reference and the nonlocal
/// control produce the outcome pair jointly.
pub trait Experiment: Sync {
    type Hidden: Send;

    fn ambient(&self) -> Option<&AmbientDistribution>;

    fn prepare(&self, tau: Option<Tau>, source: &mut Substream) -> Self::Hidden;

    fn outcome(
        &self,
        hidden: &Self::Hidden,
        tau: Tau,
        pair: SettingPair,
        wing_a: &mut Substream,
        wing_b: &mut Substream,
    ) -> OutcomePair;
}

impl<M: LocalModel> Experiment for M {
    type Hidden = M::Hidden;

    fn ambient(&self) -> Option<&AmbientDistribution> {
        LocalModel::ambient(self)
    }

    fn prepare(&self, tau: Option<Tau>, source: &mut Substream) -> M::Hidden {
        LocalModel::prepare(self, tau, source)
    }

    fn outcome(
        &self,
        hidden: &M::Hidden,
        tau: Tau,
        pair: SettingPair,
        wing_a: &mut Substream,
        wing_b: &mut Substream,
    ) -> OutcomePair {
        OutcomePair::new(
            self.respond(Wing::A, pair.a, hidden, tau, wing_a),
            self.respond(Wing::B, pair.b, hidden, tau, wing_b),
        )
    }
}

impl Experiment for QuantumReference {
    type Hidden = ();

    fn ambient(&self) -> Option<&AmbientDistribution> {
        None
    }

    fn prepare(&self, _: Option<Tau>, _: &mut Substream) {}

    fn outcome(
        &self,
        _: &(),
        _: Tau,
        pair: SettingPair,
        joint: &mut Substream,
        _: &mut Substream,
    ) -> OutcomePair {
        self.sample(pair, joint)
    }
}

impl Experiment for NonlocalControl {
    type Hidden = u64;

    fn ambient(&self) -> Option<&AmbientDistribution> {
        None
    }

    fn prepare(&self, _: Option<Tau>, source: &mut Substream) -> u64 {
        self.draw_shared(source)
    }

    fn outcome(
        &self,
        shared: &u64,
        _: Tau,
        pair: SettingPair,
        _: &mut Substream,
        _: &mut Substream,
    ) -> OutcomePair {
        OutcomePair::new(
            self.respond_seeing_far(Wing::A, pair.a, pair.b, *shared),
            self.respond_seeing_far(Wing::B, pair.b, pair.a, *shared),
        )
    }
}

fn draw_setting(rng: &mut Substream) -> Setting {
    Setting::ALL[rng.random_range(0..3)]
}

fn draw_tau(ambient: Option<&AmbientDistribution>, streams: &mut TrialStreams) -> Tau {
    let mut rng = streams.take(Role::Ambient);
    ambient.map_or(Tau(0), |a| a.sample(&mut rng))
}

pub(crate) fn run_trial<E: Experiment + ?Sized>(
    model: &E,
    root: &RandomnessStream,
    trial: u64,
    ambient_at_source: bool,
) -> (RunRecord, TrialStreams) {
    let mut streams = root.trial(trial);
    let (hidden, tau) = if ambient_at_source {
        let tau = draw_tau(model.ambient(), &mut streams);
        (
            model.prepare(Some(tau), &mut streams.take(Role::Source)),
            tau,
        )
    } else {
        let hidden = model.prepare(None, &mut streams.take(Role::Source));
        (hidden, draw_tau(model.ambient(), &mut streams))
    };
    let a = draw_setting(&mut streams.take(Role::SettingsA));
    let b = draw_setting(&mut streams.take(Role::SettingsB));
    let pair = SettingPair::new(a, b);
    let mut wing_a = streams.take(Role::WingA);
    let mut wing_b = streams.take(Role::WingB);
    let outcome = model.outcome(&hidden, tau, pair, &mut wing_a, &mut wing_b);
    (
        RunRecord {
            trial,
            pair,
            outcome,
        },
        streams,
    )
}

fn trial_range<E: Experiment + ?Sized>(
    model: &E,
    cfg: &ExperimentConfig,
    range: std::ops::Range<u64>,
) -> Vec<RunRecord> {
    let root = RandomnessStream::new(cfg.seed);
    range
        .map(|t| run_trial(model, &root, t, cfg.ambient_at_source).0)
        .collect()
}

pub fn run_experiment<E: Experiment + ?Sized>(
    model: &E,
    cfg: &ExperimentConfig,
) -> Result<Vec<RunRecord>, RefereeError> {
    if cfg.trials == 0 {
        return Err(RefereeError::NoTrials);
    }
    Ok(trial_range(model, cfg, 0..cfg.trials))
}

/// Same records as [`run_experiment`], computed over `shards` contiguous
/// trial ranges in parallel.
pub fn run_experiment_sharded<E: Experiment + ?Sized>(
    model: &E,
    cfg: &ExperimentConfig,
    shards: usize,
) -> Result<Vec<RunRecord>, RefereeError> {
    if cfg.trials == 0 {
        return Err(RefereeError::NoTrials);
    }
    let shards = shards.max(1) as u64;
    let chunk = cfg.trials.div_ceil(shards);
    let parts: Vec<Vec<RunRecord>> = (0..shards)
        .into_par_iter()
        .map(|k| {
            let start = (k * chunk).min(cfg.trials);
            let end = ((k + 1) * chunk).min(cfg.trials);
            trial_range(model, cfg, start..end)
        })
        .collect();
    Ok(parts.concat())
}

/// Runs a history-dependent strategy. Strictly sequential: run `t` sees
/// the records of runs `0..t` and nothing else.
pub fn run_adaptive_experiment<S: AdaptiveStrategy + ?Sized>(
    strategy: &S,
    trials: u64,
    seed: u64,
) -> Result<Vec<RunRecord>, RefereeError> {
    if trials == 0 {
        return Err(RefereeError::NoTrials);
    }
    let root = RandomnessStream::new(seed);
    let mut history = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mixture = InstructionMixture::new(strategy.next(&history))
            .map_err(|source| RefereeError::Model { trial, source })?;
        let (record, _) = run_trial(&mixture, &root, trial, false);
        history.push(record);
    }
    Ok(history)
}

/// A model queried with both settings visible, for locality probing. Local
/// models ignore the far setting; the nonlocal control does not.
pub trait ReplayTarget: Sync {
    type Hidden;

    fn ambient(&self) -> Option<&AmbientDistribution>;

    fn prepare(&self, source: &mut Substream) -> Self::Hidden;

    fn respond_seeing_far(
        &self,
        wing: Wing,
        own: Setting,
        far: Setting,
        hidden: &Self::Hidden,
        tau: Tau,
        local: &mut Substream,
    ) -> Color;
}

impl<M: LocalModel> ReplayTarget for M {
    type Hidden = M::Hidden;

    fn ambient(&self) -> Option<&AmbientDistribution> {
        LocalModel::ambient(self)
    }

    fn prepare(&self, source: &mut Substream) -> M::Hidden {
        LocalModel::prepare(self, None, source)
    }

    fn respond_seeing_far(
        &self,
        wing: Wing,
        own: Setting,
        _far: Setting,
        hidden: &M::Hidden,
        tau: Tau,
        local: &mut Substream,
    ) -> Color {
        self.respond(wing, own, hidden, tau, local)
    }
}

impl ReplayTarget for NonlocalControl {
    type Hidden = u64;

    fn ambient(&self) -> Option<&AmbientDistribution> {
        None
    }

    fn prepare(&self, source: &mut Substream) -> u64 {
        self.draw_shared(source)
    }

    fn respond_seeing_far(
        &self,
        wing: Wing,
        own: Setting,
        far: Setting,
        shared: &u64,
        _: Tau,
        _: &mut Substream,
    ) -> Color {
        NonlocalControl::respond_seeing_far(self, wing, own, far, *shared)
    }
}

/// A wing whose color changed when only the far setting changed.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LocalityWitness {
    pub probe: u64,
    pub wing: Wing,
    pub own: Setting,
    pub far: (Setting, Setting),
    pub colors: (Color, Color),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalityVerdict {
    Pass,
    Fail(LocalityWitness),
}

impl LocalityVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, LocalityVerdict::Pass)
    }
}

/// Replays each wing's response with identical hidden state, ambient
/// condition and local randomness while varying only the far setting.
pub fn locality_replay_check<T: ReplayTarget + ?Sized>(
    model: &T,
    seed: u64,
    probes: u64,
) -> LocalityVerdict {
    let root = RandomnessStream::new(seed);
    for probe in 0..probes {
        let mut streams = root.trial(probe);
        let hidden = model.prepare(&mut streams.take(Role::Source));
        let tau = draw_tau(model.ambient(), &mut streams);
        for wing in Wing::BOTH {
            let role = match wing {
                Wing::A => Role::WingA,
                Wing::B => Role::WingB,
            };
            for own in Setting::ALL {
                let color_for = |far: Setting| {
                    let mut local = root.substream(probe, role);
                    model.respond_seeing_far(wing, own, far, &hidden, tau, &mut local)
                };
                let baseline = color_for(Setting::One);
                for far in [Setting::Two, Setting::Three] {
                    let c = color_for(far);
                    if c != baseline {
                        return LocalityVerdict::Fail(LocalityWitness {
                            probe,
                            wing,
                            own,
                            far: (Setting::One, far),
                            colors: (baseline, c),
                        });
                    }
                }
            }
        }
    }
    LocalityVerdict::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        generate_compliant_model, worked_example, ConstantStrategy, GeneratorParams,
        IndependentCoins, InstructionSet, ParityStrategy,
    };
    use crate::rational::{ratio, Ratio};
    use crate::stats::{feature_i_fraction, same_color_fraction, tally, Probability};

    fn ggr() -> InstructionSet {
        "GGR".parse().unwrap()
    }

    #[test]
    fn causal_order_of_substreams() {
        let root = RandomnessStream::new(1);
        let (_, streams) = run_trial(&worked_example(), &root, 0, false);
        assert_eq!(
            streams.touched(),
            [
                Role::Source,
                Role::Ambient,
                Role::SettingsA,
                Role::SettingsB,
                Role::WingA,
                Role::WingB
            ]
        );
        let (_, streams) = run_trial(&worked_example(), &root, 0, true);
        assert_eq!(streams.touched()[..2], [Role::Ambient, Role::Source]);
        assert_eq!(streams.touched()[2..4], [Role::SettingsA, Role::SettingsB]);
    }

    #[test]
    fn zero_trials_rejected() {
        assert_eq!(
            run_experiment(&ggr(), &ExperimentConfig::new(0, 1)),
            Err(RefereeError::NoTrials)
        );
        assert!(run_adaptive_experiment(&ConstantStrategy(ggr()), 0, 1).is_err());
    }

    #[test]
    fn deterministic_and_contiguous() {
        let cfg = ExperimentConfig::new(500, 99);
        let a = run_experiment(&QuantumReference::default(), &cfg).unwrap();
        let b = run_experiment(&QuantumReference::default(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(i, r)| r.trial == i as u64));
    }

    #[test]
    fn shards_match_sequential() {
        let cfg = ExperimentConfig::new(1003, 5);
        let m = worked_example();
        let seq = run_experiment(&m, &cfg).unwrap();
        for shards in [1, 2, 7, 64] {
            assert_eq!(run_experiment_sharded(&m, &cfg, shards).unwrap(), seq);
        }
        let q = QuantumReference::default();
        assert_eq!(
            run_experiment_sharded(&q, &cfg, 3).unwrap(),
            run_experiment(&q, &cfg).unwrap()
        );
    }

    #[test]
    fn same_settings_about_one_third() {
        let n = 90_000;
        let records = run_experiment(&ggr(), &ExperimentConfig::new(n, 2024)).unwrap();
        let same = records.iter().filter(|r| r.pair.is_same()).count() as f64;
        let p = 1.0 / 3.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((same - n as f64 * p).abs() < 4.0 * sigma);
        let t = tally(&records);
        let p9 = 1.0 / 9.0;
        let sigma9 = (n as f64 * p9 * (1.0 - p9)).sqrt();
        for pair in SettingPair::all() {
            assert!((t.pair_count(pair) as f64 - n as f64 * p9).abs() < 4.0 * sigma9);
        }
    }

    #[test]
    fn quantum_reference_always_agrees_on_equal_settings() {
        let records = run_experiment(
            &QuantumReference::default(),
            &ExperimentConfig::new(5000, 3),
        )
        .unwrap();
        assert_eq!(
            feature_i_fraction(&tally(&records)).unwrap(),
            Probability::Exact(ratio(1, 1))
        );
    }

    #[test]
    fn coins_disagree_half_the_time_on_equal_settings() {
        let n = 90_000;
        let records = run_experiment(&IndependentCoins, &ExperimentConfig::new(n, 4)).unwrap();
        let t = tally(&records);
        let (_, m) = t.equal_setting_counts();
        let f = feature_i_fraction(&t).unwrap().as_f64();
        assert!((f - 0.5).abs() < 4.0 * (0.25 / m as f64).sqrt());
    }

    #[test]
    fn identical_instruction_sets_always_agree() {
        for set in InstructionSet::all() {
            let records = run_experiment(&set, &ExperimentConfig::new(300, 8)).unwrap();
            assert_eq!(
                feature_i_fraction(&tally(&records)).unwrap(),
                Probability::Exact(ratio(1, 1))
            );
        }
    }

    #[test]
    fn constant_strategy_matches_fixed_set() {
        let fixed = run_experiment(&ggr(), &ExperimentConfig::new(2000, 17)).unwrap();
        let adaptive = run_adaptive_experiment(&ConstantStrategy(ggr()), 2000, 17).unwrap();
        assert_eq!(fixed, adaptive);
    }

    #[test]
    fn parity_of_pure_sets_is_always_same() {
        let s = ParityStrategy {
            even: "RRR".parse().unwrap(),
            odd: "GGG".parse().unwrap(),
        };
        let records = run_adaptive_experiment(&s, 1000, 21).unwrap();
        let t = tally(&records);
        assert_eq!(
            feature_i_fraction(&t).unwrap(),
            Probability::Exact(ratio(1, 1))
        );
        assert_eq!(
            same_color_fraction(&t).unwrap(),
            Probability::Exact(ratio(1, 1))
        );
        assert!(records.iter().all(|r| {
            let c = if r.trial % 2 == 0 {
                Color::Red
            } else {
                Color::Green
            };
            r.outcome.ca == c && r.outcome.cb == c
        }));
    }

    #[test]
    fn unnormalized_strategy_is_rejected_with_trial() {
        struct Broken;
        impl AdaptiveStrategy for Broken {
            fn next(&self, history: &[RunRecord]) -> Vec<Ratio> {
                let w = if history.len() < 3 {
                    ratio(1, 8)
                } else {
                    ratio(1, 4)
                };
                vec![w; 8]
            }
        }
        match run_adaptive_experiment(&Broken, 10, 0) {
            Err(RefereeError::Model {
                trial: 3,
                source: ModelError::InvalidWeights(_),
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn locality_harness() {
        for set in InstructionSet::all() {
            assert!(locality_replay_check(&set, 1, 50).passed());
        }
        assert!(locality_replay_check(&IndependentCoins, 1, 50).passed());
        let mut rng = RandomnessStream::new(2).substream(0, Role::Source);
        let m = generate_compliant_model(GeneratorParams::new(3, 2, 5), &mut rng);
        assert!(locality_replay_check(&m, 1, 50).passed());
        match locality_replay_check(&NonlocalControl::default(), 1, 50) {
            LocalityVerdict::Fail(w) => assert_ne!(w.colors.0, w.colors.1),
            LocalityVerdict::Pass => panic!("nonlocal control passed"),
        }
    }
}
