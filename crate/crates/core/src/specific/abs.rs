//! Absolute difference `|x - y|` on the grid `{0, 1/m, ..., 1}`.
//!
//! Same scheme as greater-than, with strong partitions (mass and width at
//! most `beta`). Across distinct refinement intervals `|x - y|` has a fixed
//! sign, so the cross term needs only masses and conditional means; inside
//! an interval the integrand is at most `beta^2`.

use super::gt::{partition_bits, same_domain};
use super::partition::{common_refinement, interval_partition, interval_stats};
use crate::error::Result;
use crate::generic::BASE_FAILURE;
use crate::model::{
    amplification_runs, derive_seed, index_bits, median_of_runs, rng_from_seed, CostLedger,
    EstimateReport, Party, ProbVec, ProtocolConfig, Quantizer,
};

fn within(q: &ProbVec, qd: &[f64], starts: &[usize], x: usize) -> f64 {
    let n = q.domain_size();
    let span = (n.max(2) - 1) as f64;
    let j = starts.partition_point(|&s| s <= x) - 1;
    let end = starts.get(j + 1).copied().unwrap_or(n);
    (starts[j]..end).map(|y| qd[y] * x.abs_diff(y) as f64 / span).sum()
}

fn cross(pm: &[f64], pmean: &[f64], qm: &[f64], qmean: &[f64]) -> f64 {
    let mut total = 0.0;
    for j in 0..pm.len() {
        if pm[j] == 0.0 {
            continue;
        }
        for jp in 0..qm.len() {
            if jp != j {
                total += pm[j] * qm[jp] * (pmean[j] - qmean[jp]).abs();
            }
        }
    }
    total
}

/// The two terms of the absolute-difference decomposition on the
/// refinement of the strong partitions at `beta`, computed exactly.
pub fn abs_decomposition(p: &ProbVec, q: &ProbVec, beta: f64) -> Result<(f64, f64)> {
    same_domain(p, q)?;
    let starts = common_refinement(&interval_partition(q, beta, true), &interval_partition(p, beta, true));
    let (pm, pmean) = interval_stats(p, &starts);
    let (qm, qmean) = interval_stats(q, &starts);
    let qd = q.to_dense();
    let w: f64 = p.support().map(|(x, m)| m * within(q, &qd, &starts, x)).sum();
    Ok((w, cross(&pm, &pmean, &qm, &qmean)))
}

/// `E|x - y|` for `p, q` on the grid `{i / (N - 1)}`.
pub fn abs_protocol(p: &ProbVec, q: &ProbVec, cfg: &ProtocolConfig) -> Result<EstimateReport> {
    let n = same_domain(p, q)?;
    let eps = cfg.epsilon;
    let beta = (cfg.constant("abs.beta", 1.0) * eps.powf(0.4)).min(0.999);
    let k = (cfg.constant("abs.samples", 4.0) * (beta * beta / eps).powi(2)).ceil() as usize;

    let bob_part = interval_partition(q, beta, true);
    let alice_part = interval_partition(p, beta, true);
    let starts = common_refinement(&bob_part, &alice_part);
    let (pm, pmean) = interval_stats(p, &starts);
    let (qm, qmean) = interval_stats(q, &starts);
    // Cross-term quantization error is at most (intervals + 1) * precision / 4.
    let precision = cfg.constant("abs.precision", eps / (starts.len() + 1) as f64);
    let quant = Quantizer::new(0.0, 1.0, precision)?;
    let pm: Vec<f64> = pm.iter().map(|&m| quant.quantize(m).decoded).collect();
    let pmean: Vec<f64> = pmean.iter().map(|&m| quant.quantize(m).decoded).collect();
    let exact = cross(&pm, &pmean, &qm, &qmean);

    let qd = q.to_dense();
    let sampler = p.sampler();
    let runs = amplification_runs(cfg.delta, BASE_FAILURE);
    let (estimate, ledger) = median_of_runs(runs, |run| {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, run as u64));
        let sum: f64 = (0..k).map(|_| within(q, &qd, &starts, sampler.sample(&mut rng))).sum();
        let mut ledger = CostLedger::new();
        ledger.send(Party::Bob, partition_bits(bob_part.len(), n), "abs/partition");
        ledger.send(Party::Alice, partition_bits(alice_part.len(), n), "abs/partition");
        ledger.send_reals(Party::Alice, 2 * starts.len(), &quant, "abs/masses and means");
        ledger.send(Party::Alice, k as u64 * index_bits(n), "abs/samples");
        Ok((exact + sum / k as f64, ledger))
    })?;
    Ok(EstimateReport::new(estimate, ledger, cfg.seed))
}
