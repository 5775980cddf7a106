//! Trial batches, failure statistics, scaling fits and CSV export.
//!
//! Trials run in parallel but every record depends only on the spec and its
//! indices, so the output is identical across runs and thread counts.

mod export;
mod families;
mod instances;
mod protocols;
mod stats;

use serde::Deserialize;

pub use export::{export_csv, export_fit, import_csv, read_records, write_records, CSV_HEADER};
pub use families::{family_from_name, random_toeplitz, FAMILY_NAMES};
pub use instances::{InstanceKind, INSTANCE_NAMES};
pub use protocols::{ProtocolId, PROTOCOL_NAMES};
pub use stats::{
    by_epsilon, fit_points, fit_scaling, median, summarize, wilson_interval, EpsilonSummary, ScalingFit, WILSON_Z_99,
};

use crate::error::{invalid, Result};
use crate::model::{
    build_family, derive_seed, exact_expectation, rng_from_seed, AccessMode, FamilySpec, ProbVec, ProtocolConfig,
    TargetFn,
};
use crate::par::{map_range, Execution};

/// One experiment: a protocol, a function, an input generator and a list of
/// target errors.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub protocol: ProtocolId,
    pub family: FamilySpec,
    pub instances: InstanceKind,
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub delta: f64,
    pub access: AccessMode,
    /// Protocol constants passed through [`ProtocolConfig::with_constant`].
    pub constants: Vec<(String, f64)>,
    pub execution: Execution,
}

impl ExperimentSpec {
    pub fn new(protocol: ProtocolId, family: FamilySpec, epsilons: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self {
            protocol,
            family,
            instances: InstanceKind::default(),
            epsilons,
            trials,
            seed,
            delta: 0.1,
            access: AccessMode::default(),
            constants: Vec::new(),
            execution: Execution::default(),
        }
    }

    pub fn with_instances(mut self, instances: InstanceKind) -> Self {
        self.instances = instances;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.epsilons.is_empty() {
            return Err(invalid("epsilon", "no values given"));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("epsilon", "values must be strictly decreasing"));
        }
        for &e in &self.epsilons {
            ProtocolConfig::new(e, self.delta, 0)?;
        }
        Ok(())
    }

    fn config(&self, epsilon: f64, seed: u64) -> Result<ProtocolConfig> {
        let mut cfg = ProtocolConfig::new(epsilon, self.delta, seed)?.with_access(self.access);
        for (k, v) in &self.constants {
            cfg = cfg.with_constant(k, *v);
        }
        Ok(cfg)
    }

    /// Inputs of trial `trial`; the same for every epsilon.
    pub fn instance(&self, f: &TargetFn, trial: usize) -> Result<(ProbVec, ProbVec)> {
        let mut rng = rng_from_seed(derive_seed(self.seed, trial as u64));
        let p = self.instances.generate(f.rows(), &mut rng)?;
        let q = self.instances.generate(f.cols(), &mut rng)?;
        Ok((p, q))
    }

    /// Seed handed to the protocol for `(eps_index, trial)`.
    pub fn protocol_seed(&self, eps_index: usize, trial: usize) -> u64 {
        derive_seed(self.seed, ((eps_index as u64 + 1) << 32) | trial as u64)
    }
}

/// One protocol execution.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct TrialRecord {
    pub protocol: String,
    pub family: String,
    /// Domain size of `f`'s rows.
    pub n: usize,
    pub epsilon: f64,
    pub trial: usize,
    pub estimate: f64,
    pub truth: f64,
    pub abs_error: f64,
    pub bits_alice: u64,
    pub bits_bob: u64,
    pub rounds: u64,
    pub seed: u64,
}

impl TrialRecord {
    pub fn total_bits(&self) -> u64 {
        self.bits_alice + self.bits_bob
    }

    pub fn failed(&self) -> bool {
        self.abs_error > self.epsilon
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let f = build_family(spec.family.clone())?;
    run_experiment_on(spec, &f)
}

/// [`run_experiment`] with a prebuilt function (its spec is ignored).
pub fn run_experiment_on(spec: &ExperimentSpec, f: &TargetFn) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let jobs = spec.epsilons.len() * spec.trials;
    let family = f.family().name();
    let results = map_range(jobs, spec.execution, |job| -> Result<TrialRecord> {
        let (ei, trial) = (job / spec.trials, job % spec.trials);
        let epsilon = spec.epsilons[ei];
        let (p, q) = spec.instance(f, trial)?;
        let seed = spec.protocol_seed(ei, trial);
        let report = spec.protocol.run(&p, &q, f, &spec.config(epsilon, seed)?)?;
        let truth = exact_expectation(&p, &q, f)?;
        Ok(TrialRecord {
            protocol: spec.protocol.name().to_string(),
            family: family.to_string(),
            n: f.rows(),
            epsilon,
            trial,
            estimate: report.estimate,
            truth,
            abs_error: (report.estimate - truth).abs(),
            bits_alice: report.ledger.bits_alice(),
            bits_bob: report.ledger.bits_bob(),
            rounds: report.ledger.rounds(),
            seed,
        })
    });
    results.into_iter().collect()
}
