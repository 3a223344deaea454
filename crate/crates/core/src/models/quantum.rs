//! Joint outcome table of two spin-1/2 particles in the singlet state
//! measured along three coplanar directions 120 degrees apart.
//!
//! Color convention: at wing A, R is spin-up and G spin-down along the
//! chosen direction; at wing B the labels are swapped (R is spin-down).
//! With that swap, perfectly anticorrelated spins along a shared direction
//! flash the same color. For directions separated by angle θ the
//! same-color probability is cos²(θ/2), which is 1/4 at 120 degrees.

use rand::Rng;

use crate::rational::{ratio, Ratio};
use crate::rng::DiscreteSampler;
use crate::types::{OutcomePair, SettingPair};

/// Exact outcome distribution for every setting pair, cells in
/// [`OutcomePair::ALL`] order (RR, RG, GR, GG).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumJointTable {
    rows: [[Ratio; 4]; 9],
}

impl QuantumJointTable {
    pub fn row(&self, pair: SettingPair) -> &[Ratio; 4] {
        &self.rows[pair.index()]
    }

    pub fn rows(&self) -> &[[Ratio; 4]; 9] {
        &self.rows
    }

    pub fn prob(&self, pair: SettingPair, outcome: OutcomePair) -> &Ratio {
        &self.rows[pair.index()][outcome.index()]
    }

    pub fn same_color(&self, pair: SettingPair) -> Ratio {
        OutcomePair::ALL
            .iter()
            .filter(|o| o.is_same())
            .map(|o| self.prob(pair, *o))
            .sum()
    }
}

pub fn singlet_joint_table() -> QuantumJointTable {
    let rows = std::array::from_fn(|i| {
        let pair = SettingPair::from_index(i).expect("index < 9");
        if pair.is_same() {
            [ratio(1, 2), ratio(0, 1), ratio(0, 1), ratio(1, 2)]
        } else {
            [ratio(1, 8), ratio(3, 8), ratio(3, 8), ratio(1, 8)]
        }
    });
    QuantumJointTable { rows }
}

/// Draws one outcome pair from the table row for `pair`.
pub fn sample_reference<R: Rng + ?Sized>(
    table: &QuantumJointTable,
    pair: SettingPair,
    rng: &mut R,
) -> OutcomePair {
    OutcomePair::ALL[DiscreteSampler::new(table.row(pair)).sample(rng)]
}

/// The singlet table with its row samplers built once.
#[derive(Debug, Clone)]
pub struct QuantumReference {
    table: QuantumJointTable,
    samplers: Vec<DiscreteSampler>,
}

impl QuantumReference {
    pub fn new(table: QuantumJointTable) -> Self {
        let samplers = table.rows.iter().map(|r| DiscreteSampler::new(r)).collect();
        QuantumReference { table, samplers }
    }

    pub fn table(&self) -> &QuantumJointTable {
        &self.table
    }

    pub fn sample<R: Rng + ?Sized>(&self, pair: SettingPair, rng: &mut R) -> OutcomePair {
        OutcomePair::ALL[self.samplers[pair.index()].sample(rng)]
    }
}

impl Default for QuantumReference {
    fn default() -> Self {
        Self::new(singlet_joint_table())
    }
}
