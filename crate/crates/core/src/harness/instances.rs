use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::ProbVec;

/// Input distribution generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InstanceKind {
    PointMass,
    Uniform,
    /// Random weights on about `sqrt(N)` random elements.
    RandomSparse,
    #[default]
    RandomDense,
    /// Half the mass on one random element, the rest spread randomly.
    AdversarialAtom,
}

pub const INSTANCE_NAMES: [&str; 5] = ["point-mass", "uniform", "random-sparse", "random-dense", "adversarial-atom"];

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::PointMass => INSTANCE_NAMES[0],
            InstanceKind::Uniform => INSTANCE_NAMES[1],
            InstanceKind::RandomSparse => INSTANCE_NAMES[2],
            InstanceKind::RandomDense => INSTANCE_NAMES[3],
            InstanceKind::AdversarialAtom => INSTANCE_NAMES[4],
        }
    }

    pub fn generate<R: Rng>(self, domain: usize, rng: &mut R) -> Result<ProbVec> {
        match self {
            InstanceKind::PointMass => ProbVec::point_mass(domain, rng.random_range(0..domain)),
            InstanceKind::Uniform => ProbVec::uniform(domain),
            InstanceKind::RandomSparse => {
                let s = ((domain as f64).sqrt().ceil() as usize).clamp(1, domain);
                let entries: Vec<(usize, f64)> = (0..s)
                    .map(|_| (rng.random_range(0..domain), rng.random::<f64>() + 1e-3))
                    .collect();
                let total: f64 = entries.iter().map(|e| e.1).sum();
                let mut dense = vec![0.0; domain];
                for (x, w) in entries {
                    dense[x] += w / total;
                }
                ProbVec::from_weights(&dense)
            }
            InstanceKind::RandomDense => {
                let w: Vec<f64> = (0..domain).map(|_| rng.random::<f64>()).collect();
                ProbVec::from_weights(&w)
            }
            InstanceKind::AdversarialAtom => {
                let atom = rng.random_range(0..domain);
                let mut w: Vec<f64> = (0..domain).map(|_| rng.random::<f64>()).collect();
                let rest: f64 = w.iter().sum::<f64>() - w[atom];
                w.iter_mut().for_each(|v| *v *= 0.5 / rest.max(f64::MIN_POSITIVE));
                w[atom] = if domain == 1 { 1.0 } else { 0.5 };
                ProbVec::from_weights(&w)
            }
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "point-mass" => InstanceKind::PointMass,
            "uniform" => InstanceKind::Uniform,
            "random-sparse" => InstanceKind::RandomSparse,
            "random-dense" => InstanceKind::RandomDense,
            "adversarial-atom" => InstanceKind::AdversarialAtom,
            other => {
                return Err(Error::Unknown {
                    kind: "instance generator",
                    name: other.to_string(),
                })
            }
        })
    }
}
