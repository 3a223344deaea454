//! Contingency tallies over (setting pair, outcome pair) and the estimators
//! used to test the two data features: perfect agreement on equal settings,
//! and an overall same-color rate of one half.

use std::ops::{Add, AddAssign};

use num_traits::Zero;
use thiserror::Error;

use crate::rational::{self, Ratio};
use crate::types::{OutcomePair, RunRecord, SettingPair};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("no runs recorded")]
    EmptyData,
    #[error("no runs with equal settings recorded")]
    EmptyConditional,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Exact ratio or a Monte Carlo estimate. The two are never mixed.
#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(Ratio),
    Estimate { value: f64, samples: u64 },
}

impl Probability {
    pub fn exact(&self) -> Option<&Ratio> {
        match self {
            Probability::Exact(r) => Some(r),
            Probability::Estimate { .. } => None,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => rational::to_f64(r),
            Probability::Estimate { value, .. } => *value,
        }
    }
}

/// A conditional probability that may be undefined because its
/// conditioning cell is empty.
#[derive(Debug, Clone, PartialEq)]
pub enum Conditional {
    Defined(Ratio),
    Undefined,
}

impl Conditional {
    pub fn value(&self) -> Option<&Ratio> {
        match self {
            Conditional::Defined(r) => Some(r),
            Conditional::Undefined => None,
        }
    }
}

/// Counts indexed by (setting pair, outcome pair).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TallyTable {
    counts: [[u64; 4]; 9],
    total: u64,
}

impl TallyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, record: &RunRecord) {
        self.add_count(record.pair, record.outcome, 1);
    }

    pub fn add_count(&mut self, pair: SettingPair, outcome: OutcomePair, n: u64) {
        self.counts[pair.index()][outcome.index()] += n;
        self.total += n;
    }

    pub fn count(&self, pair: SettingPair, outcome: OutcomePair) -> u64 {
        self.counts[pair.index()][outcome.index()]
    }

    pub fn pair_count(&self, pair: SettingPair) -> u64 {
        self.counts[pair.index()].iter().sum()
    }

    pub fn pair_same_count(&self, pair: SettingPair) -> u64 {
        OutcomePair::ALL
            .iter()
            .filter(|o| o.is_same())
            .map(|o| self.count(pair, *o))
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn same_count(&self) -> u64 {
        SettingPair::all().map(|p| self.pair_same_count(p)).sum()
    }

    /// Runs with equal settings at both wings, and how many of those agreed.
    pub fn equal_setting_counts(&self) -> (u64, u64) {
        SettingPair::all()
            .filter(|p| p.is_same())
            .fold((0, 0), |(same, n), p| {
                (same + self.pair_same_count(p), n + self.pair_count(p))
            })
    }

    /// Integer table whose cell ratios equal the given per-pair outcome
    /// distributions, with every setting pair equally weighted. Returns
    /// `None` if the common denominator overflows `u64`.
    pub fn from_exact_rows(rows: &[[Ratio; 4]; 9]) -> Option<TallyTable> {
        let all: Vec<Ratio> = rows.iter().flatten().cloned().collect();
        let scale = Ratio::from_integer(rational::common_denominator(&all)?.into());
        let mut table = TallyTable::new();
        for pair in SettingPair::all() {
            for outcome in OutcomePair::ALL {
                let cell = &rows[pair.index()][outcome.index()] * &scale;
                debug_assert!(cell.is_integer());
                let n = u64::try_from(cell.to_integer()).ok()?;
                table.add_count(pair, outcome, n);
            }
        }
        Some(table)
    }
}

impl AddAssign<&TallyTable> for TallyTable {
    fn add_assign(&mut self, rhs: &TallyTable) {
        for (row, other) in self.counts.iter_mut().zip(rhs.counts.iter()) {
            for (cell, o) in row.iter_mut().zip(other.iter()) {
                *cell += o;
            }
        }
        self.total += rhs.total;
    }
}

impl Add for TallyTable {
    type Output = TallyTable;

    fn add(mut self, rhs: TallyTable) -> TallyTable {
        self += &rhs;
        self
    }
}

impl<'a> FromIterator<&'a RunRecord> for TallyTable {
    fn from_iter<I: IntoIterator<Item = &'a RunRecord>>(iter: I) -> Self {
        let mut t = TallyTable::new();
        for r in iter {
            t.record(r);
        }
        t
    }
}

pub fn tally<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> TallyTable {
    records.into_iter().collect()
}

/// Fraction of all runs in which both lights flashed the same color.
pub fn same_color_fraction(t: &TallyTable) -> Result<Probability, StatsError> {
    if t.total() == 0 {
        return Err(StatsError::EmptyData);
    }
    Ok(Probability::Exact(rational::from_count(
        t.same_count(),
        t.total(),
    )))
}

/// Fraction of equal-setting runs (11, 22, 33) that flashed the same color.
pub fn feature_i_fraction(t: &TallyTable) -> Result<Probability, StatsError> {
    let (same, n) = t.equal_setting_counts();
    if n == 0 {
        return Err(StatsError::EmptyConditional);
    }
    Ok(Probability::Exact(rational::from_count(same, n)))
}

/// Conditional same-color probability for each setting pair, indexed
/// `[a - 1][b - 1]`.
pub fn per_pair_same_table(t: &TallyTable) -> [[Conditional; 3]; 3] {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let pair = SettingPair::from_index(a * 3 + b).expect("index < 9");
            match t.pair_count(pair) {
                0 => Conditional::Undefined,
                n => Conditional::Defined(rational::from_count(t.pair_same_count(pair), n)),
            }
        })
    })
}

/// Recombine per-pair conditionals with pair weights. Undefined cells must
/// carry zero weight.
pub fn recombine(table: &[[Conditional; 3]; 3], t: &TallyTable) -> Option<Ratio> {
    if t.total() == 0 {
        return None;
    }
    let mut acc = Ratio::zero();
    for pair in SettingPair::all() {
        let n = t.pair_count(pair);
        match &table[pair.a.index()][pair.b.index()] {
            Conditional::Defined(r) => acc += r * Ratio::from_integer(n.into()),
            Conditional::Undefined if n == 0 => {}
            Conditional::Undefined => return None,
        }
    }
    Some(acc / Ratio::from_integer(t.total().into()))
}

/// Wilson score interval for a binomial proportion, clamped to [0, 1].
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> Result<(f64, f64), StatsError> {
    if n == 0 {
        return Err(StatsError::EmptyData);
    }
    if successes > n {
        return Err(StatsError::InvalidArgument(format!(
            "successes {successes} exceed trials {n}"
        )));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(StatsError::InvalidArgument(format!(
            "z must be positive, got {z}"
        )));
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let lower = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let upper = if successes == n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok((lower, upper))
}
