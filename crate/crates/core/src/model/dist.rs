//! Finite distributions and signed vectors over an indexed domain `0..N`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};

/// Slack allowed on the total mass of a [`ProbVec`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Supports at or below this fraction of the domain are stored sparsely.
pub const SPARSE_DENSITY: f64 = 0.10;

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Dense(Vec<f64>),
    /// Sorted by index, strictly positive masses only.
    Sparse(Vec<(usize, f64)>),
}

/// A probability distribution over `0..domain_size`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVec {
    domain_size: usize,
    repr: Repr,
}

impl ProbVec {
    /// Validates a dense mass vector and picks the representation by density.
    pub fn from_dense(mass: Vec<f64>) -> Result<Self> {
        let n = mass.len();
        if n == 0 {
            return Err(Error::InvalidDistribution("empty domain".into()));
        }
        let entries: Vec<(usize, f64)> = mass
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, m)| m != 0.0)
            .collect();
        validate(n, &entries)?;
        Ok(Self::choose(n, entries, Some(mass)))
    }

    /// Builds from `(index, mass)` pairs; duplicates are summed, zeros dropped.
    pub fn from_sparse(domain_size: usize, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::InvalidDistribution("empty domain".into()));
        }
        let mut entries: Vec<(usize, f64)> = entries.into_iter().collect();
        entries.sort_unstable_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, m) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += m,
                _ => merged.push((i, m)),
            }
        }
        merged.retain(|&(_, m)| m != 0.0);
        validate(domain_size, &merged)?;
        Ok(Self::choose(domain_size, merged, None))
    }

    pub fn point_mass(domain_size: usize, x: usize) -> Result<Self> {
        Self::from_sparse(domain_size, [(x, 1.0)])
    }

    pub fn uniform(domain_size: usize) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::InvalidDistribution("empty domain".into()));
        }
        Self::from_dense(vec![1.0 / domain_size as f64; domain_size])
    }

    /// Uniform over the listed (distinct) indices.
    pub fn uniform_on(domain_size: usize, support: &[usize]) -> Result<Self> {
        let w = 1.0 / support.len().max(1) as f64;
        Self::from_sparse(domain_size, support.iter().map(|&i| (i, w)))
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidDistribution(
                "weights must be finite, nonnegative and not all zero".into(),
            ));
        }
        Self::from_dense(weights.iter().map(|w| w / total).collect())
    }

    fn choose(n: usize, entries: Vec<(usize, f64)>, dense: Option<Vec<f64>>) -> Self {
        let repr = if (entries.len() as f64) <= SPARSE_DENSITY * n as f64 {
            Repr::Sparse(entries)
        } else {
            Repr::Dense(dense.unwrap_or_else(|| {
                let mut d = vec![0.0; n];
                for (i, m) in entries {
                    d[i] = m;
                }
                d
            }))
        };
        Self {
            domain_size: n,
            repr,
        }
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.repr, Repr::Sparse(_))
    }

    pub fn get(&self, i: usize) -> f64 {
        match &self.repr {
            Repr::Dense(d) => d.get(i).copied().unwrap_or(0.0),
            Repr::Sparse(s) => s
                .binary_search_by_key(&i, |&(j, _)| j)
                .map(|k| s[k].1)
                .unwrap_or(0.0),
        }
    }

    /// Nonzero entries in increasing index order.
    pub fn support(&self) -> Box<dyn Iterator<Item = (usize, f64)> + '_> {
        match &self.repr {
            Repr::Dense(d) => Box::new(
                d.iter()
                    .copied()
                    .enumerate()
                    .filter(|&(_, m)| m != 0.0),
            ),
            Repr::Sparse(s) => Box::new(s.iter().copied()),
        }
    }

    pub fn support_len(&self) -> usize {
        match &self.repr {
            Repr::Dense(d) => d.iter().filter(|m| **m != 0.0).count(),
            Repr::Sparse(s) => s.len(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Dense(d) => d.clone(),
            Repr::Sparse(s) => {
                let mut d = vec![0.0; self.domain_size];
                for &(i, m) in s {
                    d[i] = m;
                }
                d
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.support().map(|(_, m)| m).sum()
    }

    /// `sum_x p(x) q(x)`.
    pub fn inner(&self, other: &ProbVec) -> f64 {
        let (small, large) = if self.support_len() <= other.support_len() {
            (self, other)
        } else {
            (other, self)
        };
        small.support().map(|(i, m)| m * large.get(i)).sum()
    }

    /// Mixture `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &ProbVec, alpha: f64) -> Result<ProbVec> {
        if self.domain_size != other.domain_size {
            return Err(Error::DimensionMismatch {
                what: "mixture domain",
                expected: self.domain_size,
                got: other.domain_size,
            });
        }
        let entries = self
            .support()
            .map(|(i, m)| (i, alpha * m))
            .chain(other.support().map(|(i, m)| (i, (1.0 - alpha) * m)));
        ProbVec::from_sparse(self.domain_size, entries)
    }

    /// Inverse-CDF sampler over the support.
    pub fn sampler(&self) -> Sampler {
        let (index, weights): (Vec<usize>, Vec<f64>) = self.support().unzip();
        let dist = WeightedIndex::new(&weights).expect("validated distribution has positive mass");
        Sampler { index, dist }
    }
}

fn validate(n: usize, entries: &[(usize, f64)]) -> Result<()> {
    let mut total = 0.0;
    for &(i, m) in entries {
        if i >= n {
            return Err(Error::InvalidDistribution(format!(
                "index {i} outside domain of size {n}"
            )));
        }
        if !m.is_finite() || m < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "mass {m} at index {i} is negative or not finite"
            )));
        }
        total += m;
    }
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "total mass {total} differs from 1"
        )));
    }
    Ok(())
}

/// Draws domain indices from a fixed [`ProbVec`].
#[derive(Clone, Debug)]
pub struct Sampler {
    index: Vec<usize>,
    dist: WeightedIndex<f64>,
}

impl Sampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index[self.dist.sample(rng)]
    }
}

/// Draws one index `x` with probability `p(x)`.
pub fn sample<R: Rng + ?Sized>(p: &ProbVec, rng: &mut R) -> usize {
    p.sampler().sample(rng)
}

/// A real vector over `0..domain_size`, stored as its nonzero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedVec {
    domain_size: usize,
    values: Vec<(usize, f64)>,
}

impl SignedVec {
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        Self::from_sparse(
            values.len(),
            values.iter().copied().enumerate().filter(|&(_, v)| v != 0.0),
        )
    }

    pub fn from_sparse(domain_size: usize, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut values: Vec<(usize, f64)> = entries.into_iter().filter(|&(_, v)| v != 0.0).collect();
        values.sort_unstable_by_key(|&(i, _)| i);
        for w in values.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(invalid_signed(format!("duplicate index {}", w[0].0)));
            }
        }
        for &(i, v) in &values {
            if i >= domain_size {
                return Err(invalid_signed(format!("index {i} outside domain {domain_size}")));
            }
            if !v.is_finite() {
                return Err(invalid_signed(format!("value at {i} is not finite")));
            }
        }
        Ok(Self {
            domain_size,
            values,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.values
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|(_, v)| v.abs()).sum()
    }

    pub fn negate(&self) -> SignedVec {
        SignedVec {
            domain_size: self.domain_size,
            values: self.values.iter().map(|&(i, v)| (i, -v)).collect(),
        }
    }

    /// Splits into nonnegative parts `(v+, v-)` with `v = v+ - v-`.
    pub fn split(&self) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
        let pos = self.values.iter().filter(|e| e.1 > 0.0).copied().collect();
        let neg = self
            .values
            .iter()
            .filter(|e| e.1 < 0.0)
            .map(|&(i, v)| (i, -v))
            .collect();
        (pos, neg)
    }
}

impl From<&ProbVec> for SignedVec {
    fn from(p: &ProbVec) -> Self {
        SignedVec {
            domain_size: p.domain_size(),
            values: p.support().collect(),
        }
    }
}

fn invalid_signed(reason: String) -> Error {
    Error::InvalidParameter {
        name: "signed vector",
        reason,
    }
}
