use std::collections::BTreeMap;

use super::rng::derive_seed;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AccessMode {
    /// Parties know their distributions exactly.
    #[default]
    FullDistribution,
    /// Parties only draw samples; conditional means become sample averages.
    SampleOnly,
}

/// Knobs shared by every protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub access: AccessMode,
    constants: BTreeMap<String, f64>,
}

impl ProtocolConfig {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid("epsilon", format!("{epsilon} not in (0, 1)")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(invalid("delta", format!("{delta} not in (0, 1/2)")));
        }
        Ok(Self {
            epsilon,
            delta,
            seed,
            access: AccessMode::default(),
            constants: BTreeMap::new(),
        })
    }

    pub fn with_access(mut self, access: AccessMode) -> Self {
        self.access = access;
        self
    }

    /// Overrides a named constant (sample-count multipliers and the like).
    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.constants.insert(name.to_string(), value);
        self
    }

    pub fn constant(&self, name: &str, default: f64) -> f64 {
        self.constants.get(name).copied().unwrap_or(default)
    }

    pub fn constants(&self) -> &BTreeMap<String, f64> {
        &self.constants
    }

    /// Same settings for a sub-protocol: new error target, independent seed.
    pub fn child(&self, epsilon: f64, stream: u64) -> Self {
        Self {
            epsilon,
            seed: derive_seed(self.seed, stream),
            ..self.clone()
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }
}
