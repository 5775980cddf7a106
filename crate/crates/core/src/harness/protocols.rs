use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generic::{
    debiasing_protocol, random_sampling_protocol, spectral_hybrid_protocol, spectral_protocol, svd_protocol,
};
use crate::model::{exact_expectation, CostLedger, EstimateReport, Party, ProbVec, ProtocolConfig, TargetFn};
use crate::specific::{
    abs_protocol, convex_lipschitz_protocol, eq_protocol, gt_protocol, smooth_protocol, sparse_protocol,
    toeplitz_protocol,
};

/// A runnable protocol together with its structural parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProtocolId {
    Sampling,
    Debias,
    /// Truncation rank; `None` keeps the full rank.
    Svd { rank: Option<usize> },
    Spectral,
    Hybrid { t: usize },
    Eq,
    Sparse,
    Gt,
    Abs,
    Convex,
    Smooth { k: usize },
    Toeplitz,
    /// Test double whose Alice sends `round(scale * eps^-exponent)` bits and
    /// reports the exact answer.
    PowerLaw { exponent: f64, scale: f64 },
}

pub const PROTOCOL_NAMES: [&str; 13] = [
    "sampling", "debias", "svd", "spectral", "hybrid", "eq", "sparse", "gt", "abs", "convex", "smooth", "toeplitz",
    "power_law",
];

impl ProtocolId {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolId::Sampling => "sampling",
            ProtocolId::Debias => "debias",
            ProtocolId::Svd { .. } => "svd",
            ProtocolId::Spectral => "spectral",
            ProtocolId::Hybrid { .. } => "hybrid",
            ProtocolId::Eq => "eq",
            ProtocolId::Sparse => "sparse",
            ProtocolId::Gt => "gt",
            ProtocolId::Abs => "abs",
            ProtocolId::Convex => "convex",
            ProtocolId::Smooth { .. } => "smooth",
            ProtocolId::Toeplitz => "toeplitz",
            ProtocolId::PowerLaw { .. } => "power_law",
        }
    }

    /// Family a protocol runs on when none is named.
    pub fn default_family_name(&self) -> &'static str {
        match self {
            ProtocolId::Sampling | ProtocolId::Debias => "random_boolean",
            ProtocolId::Svd { .. } | ProtocolId::Spectral | ProtocolId::Hybrid { .. } => "hadamard",
            ProtocolId::Eq | ProtocolId::Sparse | ProtocolId::PowerLaw { .. } => "eq",
            ProtocolId::Gt => "gt",
            ProtocolId::Abs | ProtocolId::Convex => "abs",
            ProtocolId::Smooth { .. } => "smooth",
            ProtocolId::Toeplitz => "toeplitz",
        }
    }

    pub fn run(&self, p: &ProbVec, q: &ProbVec, f: &TargetFn, cfg: &ProtocolConfig) -> Result<EstimateReport> {
        match *self {
            ProtocolId::Sampling => random_sampling_protocol(p, q, f, cfg),
            ProtocolId::Debias => debiasing_protocol(p, q, f, cfg),
            ProtocolId::Svd { rank } => svd_protocol(p, q, f, cfg, rank.unwrap_or(f.rows().min(f.cols()))),
            ProtocolId::Spectral => spectral_protocol(p, q, f, cfg),
            ProtocolId::Hybrid { t } => spectral_hybrid_protocol(p, q, f, cfg, t),
            ProtocolId::Eq => eq_protocol(p, q, cfg),
            ProtocolId::Sparse => sparse_protocol(p, q, f, cfg),
            ProtocolId::Gt => gt_protocol(p, q, cfg),
            ProtocolId::Abs => abs_protocol(p, q, cfg),
            ProtocolId::Convex => convex_lipschitz_protocol(p, q, f, cfg),
            ProtocolId::Smooth { k } => smooth_protocol(p, q, f, k, cfg),
            ProtocolId::Toeplitz => toeplitz_protocol(p, q, f, cfg),
            ProtocolId::PowerLaw { exponent, scale } => {
                let bits = (scale * cfg.epsilon.powf(-exponent)).round() as u64;
                let mut ledger = CostLedger::new();
                ledger.send(Party::Alice, bits, "stub/payload");
                Ok(EstimateReport::new(exact_expectation(p, q, f)?, ledger, cfg.seed))
            }
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolId {
    type Err = Error;

    /// Plain names take default parameters (hybrid `t = 1`, smooth `k = 2`,
    /// power law exponent 2 at scale 10^6).
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sampling" => ProtocolId::Sampling,
            "debias" => ProtocolId::Debias,
            "svd" => ProtocolId::Svd { rank: None },
            "spectral" => ProtocolId::Spectral,
            "hybrid" => ProtocolId::Hybrid { t: 1 },
            "eq" => ProtocolId::Eq,
            "sparse" => ProtocolId::Sparse,
            "gt" => ProtocolId::Gt,
            "abs" => ProtocolId::Abs,
            "convex" => ProtocolId::Convex,
            "smooth" => ProtocolId::Smooth { k: 2 },
            "toeplitz" => ProtocolId::Toeplitz,
            "power_law" => ProtocolId::PowerLaw { exponent: 2.0, scale: 1e6 },
            other => {
                return Err(Error::Unknown {
                    kind: "protocol",
                    name: other.to_string(),
                })
            }
        })
    }
}
