use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::ambient::validate_weights;
use super::{LocalModel, ModelError, Tau};
use crate::rational::Ratio;
use crate::rng::{DiscreteSampler, Substream};
use crate::types::{Color, Setting, Wing};

/// The color to flash for each of the three settings, written in setting
/// order: `GGR` flashes G on 1 and 2, R on 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstructionSet([Color; 3]);

impl InstructionSet {
    pub const fn new(colors: [Color; 3]) -> Self {
        InstructionSet(colors)
    }

    /// All eight sets in canonical order RRR, RRG, RGR, ..., GGG.
    pub fn all() -> [InstructionSet; 8] {
        std::array::from_fn(Self::from_canonical_index)
    }

    /// Inverse of [`canonical_index`](Self::canonical_index); `i` is taken mod 8.
    pub fn from_canonical_index(i: usize) -> InstructionSet {
        let bit = |shift: usize| {
            if (i >> shift) & 1 == 1 {
                Color::Green
            } else {
                Color::Red
            }
        };
        InstructionSet([bit(2), bit(1), bit(0)])
    }

    pub fn canonical_index(self) -> usize {
        self.0
            .iter()
            .fold(0, |acc, c| acc * 2 + (*c == Color::Green) as usize)
    }

    pub fn color(self, setting: Setting) -> Color {
        self.0[setting.index()]
    }

    pub fn colors(self) -> [Color; 3] {
        self.0
    }

    pub fn is_pure(self) -> bool {
        self.0[0] == self.0[1] && self.0[1] == self.0[2]
    }
}

pub fn respond_instruction_set(set: InstructionSet, setting: Setting) -> Color {
    set.color(setting)
}

impl fmt::Display for InstructionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for InstructionSet {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let colors: Vec<Color> = s
            .chars()
            .map(Color::from_letter)
            .collect::<Option<_>>()
            .ok_or_else(|| ModelError::InstructionSet(s.to_string()))?;
        let colors: [Color; 3] = colors
            .try_into()
            .map_err(|_| ModelError::InstructionSet(s.to_string()))?;
        Ok(InstructionSet(colors))
    }
}

impl serde::Serialize for InstructionSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl LocalModel for InstructionSet {
    type Hidden = ();

    fn prepare(&self, _: Option<Tau>, _: &mut Substream) {}

    fn respond(&self, _: Wing, setting: Setting, _: &(), _: Tau, _: &mut Substream) -> Color {
        self.color(setting)
    }
}

/// A fresh instruction set drawn each run from fixed weights.
#[derive(Debug, Clone)]
pub struct InstructionMixture {
    weights: [Ratio; 8],
    sampler: DiscreteSampler,
}

impl PartialEq for InstructionMixture {
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights
    }
}

impl InstructionMixture {
    /// Weights in canonical set order; must be nonnegative and sum to one.
    pub fn new(weights: Vec<Ratio>) -> Result<Self, ModelError> {
        let weights: [Ratio; 8] = weights.try_into().map_err(|w: Vec<Ratio>| {
            ModelError::InvalidWeights(format!("expected 8 weights, got {}", w.len()))
        })?;
        validate_weights(&weights)?;
        let sampler = DiscreteSampler::new(&weights);
        Ok(InstructionMixture { weights, sampler })
    }

    pub fn point(set: InstructionSet) -> Self {
        let mut w = vec![Ratio::default(); 8];
        w[set.canonical_index()] = Ratio::from_integer(1.into());
        Self::new(w).expect("point mass is normalized")
    }

    pub fn uniform() -> Self {
        Self::new(vec![crate::rational::ratio(1, 8); 8]).expect("uniform is normalized")
    }

    pub fn weights(&self) -> &[Ratio; 8] {
        &self.weights
    }

    pub fn weight(&self, set: InstructionSet) -> &Ratio {
        &self.weights[set.canonical_index()]
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> InstructionSet {
        InstructionSet::from_canonical_index(self.sampler.sample(rng))
    }
}

impl LocalModel for InstructionMixture {
    type Hidden = InstructionSet;

    fn prepare(&self, _: Option<Tau>, source: &mut Substream) -> InstructionSet {
        self.draw(source)
    }

    fn respond(
        &self,
        _: Wing,
        setting: Setting,
        set: &InstructionSet,
        _: Tau,
        _: &mut Substream,
    ) -> Color {
        set.color(setting)
    }
}

/// Each wing flashes an independent fair coin.
#[derive(Debug, Clone, Copy, Default)]
pub struct IndependentCoins;

impl LocalModel for IndependentCoins {
    type Hidden = ();

    fn prepare(&self, _: Option<Tau>, _: &mut Substream) {}

    fn respond(&self, _: Wing, _: Setting, _: &(), _: Tau, local: &mut Substream) -> Color {
        if local.random::<bool>() {
            Color::Green
        } else {
            Color::Red
        }
    }
}
