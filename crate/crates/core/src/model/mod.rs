pub mod amplify;
pub mod config;
pub mod dist;
pub mod func;
pub mod ledger;
pub mod oracle;
pub mod quant;
pub mod report;
pub mod rng;

pub use amplify::{amplification_runs, median_of_runs};
pub use config::{AccessMode, ProtocolConfig};
pub use dist::{sample, ProbVec, Sampler, SignedVec};
pub use func::{DENSE_CAP, build_family, Family, FamilySpec, Poly, SmoothKind, SmoothSurface, TargetFn};
pub use ledger::{CostLedger, Message, Party};
pub use oracle::{col_mean, exact_expectation, row_mean};
pub use quant::{index_bits, quantize, real_bits, Quantized, Quantizer};
pub use report::EstimateReport;
pub use rng::{derive_seed, rng_from_seed, ProtocolRng};
