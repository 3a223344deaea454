use std::fmt;

use num_traits::{One, Zero};

use super::ModelError;
use crate::rational::{self, Ratio};
use crate::rng::DiscreteSampler;

/// Index of an ambient condition within its distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Tau(pub usize);

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// Finite distribution over labelled ambient conditions.
#[derive(Debug, Clone)]
pub struct AmbientDistribution {
    labels: Vec<String>,
    weights: Vec<Ratio>,
    sampler: DiscreteSampler,
}

impl PartialEq for AmbientDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.weights == other.weights
    }
}

impl AmbientDistribution {
    pub fn new(entries: Vec<(String, Ratio)>) -> Result<Self, ModelError> {
        if entries.is_empty() {
            return Err(ModelError::InvalidWeights("ambient domain is empty".into()));
        }
        let (labels, weights): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ModelError::InvalidWeights(format!(
                    "ambient condition {l:?} listed twice"
                )));
            }
        }
        validate_weights(&weights)?;
        let sampler = DiscreteSampler::new(&weights);
        Ok(AmbientDistribution {
            labels,
            weights,
            sampler,
        })
    }

    /// A single condition with weight one.
    pub fn single(label: &str) -> Self {
        Self::new(vec![(label.to_string(), Ratio::one())]).expect("valid point mass")
    }

    /// Equal weights over `n` conditions labelled `t0, t1, ...`.
    pub fn uniform(n: usize) -> Result<Self, ModelError> {
        let w = rational::from_count(1, n.max(1) as u64);
        Self::new((0..n).map(|i| (format!("t{i}"), w.clone())).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, tau: Tau) -> &str {
        &self.labels[tau.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weight(&self, tau: Tau) -> &Ratio {
        &self.weights[tau.0]
    }

    pub fn find(&self, label: &str) -> Option<Tau> {
        self.labels.iter().position(|l| l == label).map(Tau)
    }

    pub fn all(&self) -> impl Iterator<Item = Tau> + '_ {
        (0..self.labels.len()).map(Tau)
    }

    /// Conditions with positive weight, in declaration order.
    pub fn support(&self) -> impl Iterator<Item = Tau> + '_ {
        self.all().filter(|t| !self.weights[t.0].is_zero())
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Tau {
        Tau(self.sampler.sample(rng))
    }
}

pub(crate) fn validate_weights(weights: &[Ratio]) -> Result<(), ModelError> {
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| **w < Ratio::zero())
    {
        return Err(ModelError::InvalidWeights(format!(
            "weight {i} is negative ({})",
            rational::format_ratio(w)
        )));
    }
    let sum: Ratio = weights.iter().sum();
    if !sum.is_one() {
        return Err(ModelError::InvalidWeights(format!(
            "weights sum to {}, not 1",
            rational::format_ratio(&sum)
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn rejects_bad_weights() {
        let bad =
            AmbientDistribution::new(vec![("a".into(), ratio(1, 2)), ("b".into(), ratio(1, 3))]);
        assert!(matches!(bad, Err(ModelError::InvalidWeights(_))));
        let neg =
            AmbientDistribution::new(vec![("a".into(), ratio(3, 2)), ("b".into(), ratio(-1, 2))]);
        assert!(matches!(neg, Err(ModelError::InvalidWeights(_))));
        assert!(AmbientDistribution::new(vec![]).is_err());
        let dup =
            AmbientDistribution::new(vec![("a".into(), ratio(1, 2)), ("a".into(), ratio(1, 2))]);
        assert!(dup.is_err());
    }

    #[test]
    fn support_skips_zero_weight() {
        let d =
            AmbientDistribution::new(vec![("a".into(), ratio(0, 1)), ("b".into(), ratio(1, 1))])
                .unwrap();
        assert_eq!(d.support().collect::<Vec<_>>(), vec![Tau(1)]);
        assert_eq!(d.find("b"), Some(Tau(1)));
    }
}
