//! Counter-based randomness: every (trial, role) pair owns an independent
//! ChaCha stream derived from the root seed, so trials can be evaluated in
//! any order or on any number of workers with identical results.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{self, Ratio};

pub type Substream = ChaCha8Rng;

/// Who consumes a substream within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Source,
    Ambient,
    SettingsA,
    SettingsB,
    WingA,
    WingB,
}

impl Role {
    fn code(self) -> u64 {
        match self {
            Role::Source => 0,
            Role::Ambient => 1,
            Role::SettingsA => 2,
            Role::SettingsB => 3,
            Role::WingA => 4,
            Role::WingB => 5,
        }
    }
}

const ROLE_BITS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomnessStream {
    seed: u64,
}

impl RandomnessStream {
    pub fn new(seed: u64) -> Self {
        RandomnessStream { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The substream keyed by `(trial, role)`. Trial indices must stay
    /// below 2^61.
    pub fn substream(&self, trial: u64, role: Role) -> Substream {
        assert!(
            trial < 1 << (64 - ROLE_BITS),
            "trial index {trial} out of range"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((trial << ROLE_BITS) | role.code());
        rng
    }

    pub fn trial(&self, trial: u64) -> TrialStreams {
        TrialStreams {
            root: *self,
            trial,
            touched: Vec::with_capacity(6),
        }
    }
}

/// Hands out the substreams of one trial and remembers the order in which
/// roles were first requested.
#[derive(Debug)]
pub struct TrialStreams {
    root: RandomnessStream,
    trial: u64,
    touched: Vec<Role>,
}

impl TrialStreams {
    pub fn take(&mut self, role: Role) -> Substream {
        self.touched.push(role);
        self.root.substream(self.trial, role)
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    pub fn touched(&self) -> &[Role] {
        &self.touched
    }
}

/// Draws an index from a finite distribution with rational weights. When
/// the common denominator fits in 64 bits the draw is exact; otherwise it
/// falls back to cumulative `f64` comparison.
#[derive(Debug, Clone)]
pub struct DiscreteSampler {
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Exact { denom: u64, cumulative: Vec<u64> },
    Float { cumulative: Vec<f64> },
}

impl DiscreteSampler {
    /// Weights must be nonnegative and sum to one; callers validate.
    pub fn new(weights: &[Ratio]) -> Self {
        assert!(!weights.is_empty());
        let kind = match rational::common_denominator(weights) {
            Some(denom) => {
                let scale = Ratio::from_integer(denom.into());
                let mut acc = 0u64;
                let cumulative = weights
                    .iter()
                    .map(|w| {
                        acc += (w * &scale).to_integer().to_u64().unwrap_or(0);
                        acc
                    })
                    .collect();
                SamplerKind::Exact { denom, cumulative }
            }
            None => {
                let mut acc = 0.0;
                let cumulative = weights
                    .iter()
                    .map(|w| {
                        acc += rational::to_f64(w);
                        acc
                    })
                    .collect();
                SamplerKind::Float { cumulative }
            }
        };
        DiscreteSampler { kind }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.kind {
            SamplerKind::Exact { denom, cumulative } => {
                let u = rng.random_range(0..*denom);
                cumulative.partition_point(|&c| c <= u)
            }
            SamplerKind::Float { cumulative } => {
                let u: f64 = rng.random();
                cumulative
                    .partition_point(|&c| c <= u)
                    .min(cumulative.len() - 1)
            }
        }
    }
}
