//! Negative control: reproduces the singlet statistics by letting each wing
//! read the other wing's setting.

use rand::Rng;

use super::quantum::{singlet_joint_table, QuantumJointTable};
use crate::rational::common_denominator;
use crate::types::{Color, OutcomePair, Setting, SettingPair, Wing};

#[derive(Debug, Clone)]
pub struct NonlocalControl {
    table: QuantumJointTable,
    // cumulative integer thresholds per row over a shared denominator
    thresholds: Vec<[u64; 4]>,
    denom: u64,
}

impl NonlocalControl {
    pub fn new(table: QuantumJointTable) -> Self {
        let all: Vec<_> = table.rows().iter().flatten().cloned().collect();
        let denom = common_denominator(&all).expect("table denominators are small");
        let scale = crate::rational::Ratio::from_integer(denom.into());
        let thresholds = table
            .rows()
            .iter()
            .map(|row| {
                let mut acc = 0u64;
                std::array::from_fn(|i| {
                    acc += u64::try_from((&row[i] * &scale).to_integer()).expect("nonnegative");
                    acc
                })
            })
            .collect();
        NonlocalControl {
            table,
            thresholds,
            denom,
        }
    }

    pub fn table(&self) -> &QuantumJointTable {
        &self.table
    }

    /// The shared draw prepared at the source, uniform on `0..denom`.
    pub fn draw_shared<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.denom)
    }

    /// The color at `wing`, computed from both settings and the shared draw.
    pub fn respond_seeing_far(&self, wing: Wing, own: Setting, far: Setting, shared: u64) -> Color {
        let pair = match wing {
            Wing::A => SettingPair::new(own, far),
            Wing::B => SettingPair::new(far, own),
        };
        self.joint(pair, shared).color(wing)
    }

    pub fn joint(&self, pair: SettingPair, shared: u64) -> OutcomePair {
        let row = &self.thresholds[pair.index()];
        OutcomePair::ALL[row.partition_point(|&c| c <= shared)]
    }
}

impl Default for NonlocalControl {
    fn default() -> Self {
        Self::new(singlet_joint_table())
    }
}

/// One run of the nonlocal control: wing B's color is computed with wing
/// A's setting in hand.
pub fn nonlocal_control_respond<R: Rng + ?Sized>(
    control: &NonlocalControl,
    pair: SettingPair,
    rng: &mut R,
) -> OutcomePair {
    let shared = control.draw_shared(rng);
    OutcomePair::new(
        control.respond_seeing_far(Wing::A, pair.a, pair.b, shared),
        control.respond_seeing_far(Wing::B, pair.b, pair.a, shared),
    )
}
