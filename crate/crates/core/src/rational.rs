//! Exact rational helpers on top of `num_rational::BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub type Ratio = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational {0:?}, expected \"p/q\" or an integer")]
pub struct RatioParseError(pub String);

pub fn ratio(numer: i64, denom: i64) -> Ratio {
    Ratio::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn from_count(numer: u64, denom: u64) -> Ratio {
    Ratio::new(BigInt::from(numer), BigInt::from(denom))
}

/// Always `p/q`, including integers (`1/1`, `0/1`).
pub fn format_ratio(r: &Ratio) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(s: &str) -> Result<Ratio, RatioParseError> {
    let err = || RatioParseError(s.to_string());
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Ratio::new(n, d))
}

pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_probability(r: &Ratio) -> bool {
    *r >= Ratio::zero() && *r <= Ratio::one()
}

/// Least common multiple of the denominators, when it fits in a `u64`.
pub fn common_denominator(values: &[Ratio]) -> Option<u64> {
    values
        .iter()
        .try_fold(BigInt::one(), |acc, r| {
            let l = acc.lcm(r.denom());
            (l.bits() <= 64).then_some(l)
        })
        .and_then(|l| l.to_u64())
}
