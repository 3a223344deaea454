//! Strategies whose instruction-set distribution may change from run to
//! run in response to everything recorded so far.

use crate::rational::{ratio, Ratio};
use crate::types::{RunRecord, SettingPair};

use super::InstructionSet;

pub trait AdaptiveStrategy {
    /// Weights over the eight instruction sets in canonical order for the
    /// next run, given the completed runs. The referee rejects weights that
    /// are negative or do not sum to one.
    fn next(&self, history: &[RunRecord]) -> Vec<Ratio>;
}

fn point_mass(set: InstructionSet) -> Vec<Ratio> {
    let mut w = vec![ratio(0, 1); 8];
    w[set.canonical_index()] = ratio(1, 1);
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantStrategy(pub InstructionSet);

impl AdaptiveStrategy for ConstantStrategy {
    fn next(&self, _: &[RunRecord]) -> Vec<Ratio> {
        point_mass(self.0)
    }
}

/// `even` after an even number of completed runs, `odd` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityStrategy {
    pub even: InstructionSet,
    pub odd: InstructionSet,
}

impl AdaptiveStrategy for ParityStrategy {
    fn next(&self, history: &[RunRecord]) -> Vec<Ratio> {
        point_mass(if history.len().is_multiple_of(2) {
            self.even
        } else {
            self.odd
        })
    }
}

/// Picks the mixed instruction set whose agreeing setting pairs produced
/// the fewest same-color runs among the last [`LeastSameStrategy::WINDOW`]
/// runs, trying to drag the observed same-color rate down.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LeastSameStrategy;

impl LeastSameStrategy {
    pub const WINDOW: usize = 1024;
}

impl AdaptiveStrategy for LeastSameStrategy {
    fn next(&self, history: &[RunRecord]) -> Vec<Ratio> {
        let recent = &history[history.len().saturating_sub(Self::WINDOW)..];
        let mut same_by_pair = [0u64; 9];
        for r in recent.iter().filter(|r| r.outcome.is_same()) {
            same_by_pair[r.pair.index()] += 1;
        }
        let score = |set: &InstructionSet| -> u64 {
            SettingPair::all()
                .filter(|p| set.color(p.a) == set.color(p.b))
                .map(|p| same_by_pair[p.index()])
                .sum()
        };
        let best = InstructionSet::all()
            .into_iter()
            .filter(|s| !s.is_pure())
            .min_by_key(score)
            .expect("six mixed sets");
        point_mass(best)
    }
}
