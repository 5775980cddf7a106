//! Greater-than, `f(x, y) = 1[x >= y]`, via interval partitions.
//!
//! On the common refinement `I_1 < ... < I_m` of both parties' partitions,
//! `Pr[x >= y] = E_{x~p}[q(I_j(x) and y <= x)] + sum_{j > j'} p_j q_j'`.
//! Bob evaluates the cross sum from Alice's interval masses and the first
//! term from Alice's samples; its integrand is at most the interval's
//! `q`-mass, so few samples suffice.

use super::partition::{common_refinement, interval_partition, interval_stats};
use crate::error::{Error, Result};
use crate::generic::BASE_FAILURE;
use crate::model::{
    amplification_runs, derive_seed, index_bits, median_of_runs, rng_from_seed, CostLedger,
    EstimateReport, Party, ProbVec, ProtocolConfig, Quantizer,
};

pub(crate) fn same_domain(p: &ProbVec, q: &ProbVec) -> Result<usize> {
    if p.domain_size() != q.domain_size() {
        return Err(Error::DimensionMismatch {
            what: "q domain vs p domain",
            expected: p.domain_size(),
            got: q.domain_size(),
        });
    }
    Ok(p.domain_size())
}

/// Cost of announcing a partition: its size and its interior endpoints.
pub(crate) fn partition_bits(intervals: usize, n: usize) -> u64 {
    index_bits(n + 1) + (intervals as u64 - 1) * index_bits(n)
}

fn prefix(q: &ProbVec) -> Vec<f64> {
    let mut out = Vec::with_capacity(q.domain_size() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for v in q.to_dense() {
        acc += v;
        out.push(acc);
    }
    out
}

/// The two terms of the greater-than decomposition on the refinement of
/// the weak partitions of `p` and `q` at `beta`, both computed exactly.
/// Their sum is `Pr[x >= y]`.
pub fn gt_decomposition(p: &ProbVec, q: &ProbVec, beta: f64) -> Result<(f64, f64)> {
    same_domain(p, q)?;
    let starts = common_refinement(&interval_partition(q, beta, false), &interval_partition(p, beta, false));
    let (pm, _) = interval_stats(p, &starts);
    let (qm, _) = interval_stats(q, &starts);
    let cum = prefix(q);
    let within: f64 = p
        .support()
        .map(|(x, m)| {
            let j = starts.partition_point(|&s| s <= x) - 1;
            m * (cum[x + 1] - cum[starts[j]])
        })
        .sum();
    let mut below = 0.0;
    let mut cross = 0.0;
    for j in 0..starts.len() {
        cross += pm[j] * below;
        below += qm[j];
    }
    Ok((within, cross))
}

pub fn gt_protocol(p: &ProbVec, q: &ProbVec, cfg: &ProtocolConfig) -> Result<EstimateReport> {
    let n = same_domain(p, q)?;
    let eps = cfg.epsilon;
    let beta = (cfg.constant("gt.beta", 1.0) * eps.powf(2.0 / 3.0)).min(0.999);
    let k = (cfg.constant("gt.samples", 4.0) * (beta / eps).powi(2)).ceil() as usize;

    let bob_part = interval_partition(q, beta, false);
    let alice_part = interval_partition(p, beta, false);
    let starts = common_refinement(&bob_part, &alice_part);
    let (pm, _) = interval_stats(p, &starts);
    let (qm, _) = interval_stats(q, &starts);
    let mass_q = Quantizer::new(0.0, 1.0, eps.powi(3))?;
    let pm: Vec<f64> = pm.iter().map(|&m| mass_q.quantize(m).decoded).collect();
    let singleton = |j: usize| starts.get(j + 1).copied().unwrap_or(n) - starts[j] == 1;

    let mut below = 0.0;
    let mut exact = 0.0;
    for j in 0..starts.len() {
        exact += pm[j] * below;
        if singleton(j) {
            exact += pm[j] * qm[j];
        }
        below += qm[j];
    }

    let cum = prefix(q);
    let sampler = p.sampler();
    let runs = amplification_runs(cfg.delta, BASE_FAILURE);
    let (estimate, ledger) = median_of_runs(runs, |run| {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, run as u64));
        let mut sum = 0.0;
        for _ in 0..k {
            let x = sampler.sample(&mut rng);
            let j = starts.partition_point(|&s| s <= x) - 1;
            if !singleton(j) {
                sum += cum[x + 1] - cum[starts[j]];
            }
        }
        let mut ledger = CostLedger::new();
        ledger.send(Party::Bob, partition_bits(bob_part.len(), n), "gt/partition");
        ledger.send(Party::Alice, partition_bits(alice_part.len(), n), "gt/partition");
        ledger.send_reals(Party::Alice, starts.len(), &mass_q, "gt/masses");
        ledger.send(Party::Alice, k as u64 * index_bits(n), "gt/samples");
        Ok((exact + sum / k as f64, ledger))
    })?;
    Ok(EstimateReport::new(estimate, ledger, cfg.seed))
}
