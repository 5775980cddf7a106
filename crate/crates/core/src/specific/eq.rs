//! Equality: estimating the collision probability `<p, q>`.
//!
//! Both vectors are truncated to their `eps'`-heavy entries and hashed into
//! `m = 40 / eps'^2` buckets with a public hash. Alice sends her hashed
//! entries of mass at least `beta`; Bob answers with the heavy part of the
//! inner product, `|q'|_1` and `t` samples from `q' / |q'|_1`, from which
//! Alice estimates the light part.

use std::collections::BTreeMap;

use rand::Rng;

use super::heavy::heavy_truncate;
use crate::error::{Error, Result};
use crate::generic::BASE_FAILURE;
use crate::model::rng::mix64;
use crate::model::{
    amplification_runs, derive_seed, index_bits, median_of_runs, rng_from_seed, CostLedger,
    EstimateReport, Party, ProbVec, ProtocolConfig, Quantizer,
};

/// Bucket of `x` under the public hash with key `key`.
pub fn bucket(key: u64, x: usize, m: usize) -> usize {
    (mix64(key ^ mix64(x as u64)) % m as u64) as usize
}

fn hashed(entries: &[(usize, f64)], key: u64, m: usize) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for &(x, v) in entries {
        *out.entry(bucket(key, x, m)).or_insert(0.0) += v;
    }
    out
}

pub fn eq_protocol(p: &ProbVec, q: &ProbVec, cfg: &ProtocolConfig) -> Result<EstimateReport> {
    if p.domain_size() != q.domain_size() {
        return Err(Error::DimensionMismatch {
            what: "q domain vs p domain",
            expected: p.domain_size(),
            got: q.domain_size(),
        });
    }
    let n = p.domain_size();
    let e = cfg.epsilon / cfg.constant("eq.scale", 6.0);
    let m = (cfg.constant("eq.buckets", 40.0) / (e * e)).ceil() as usize;
    let beta = e.powf(2.0 / 3.0);
    let t = (cfg.constant("eq.samples", 2.5) / beta).ceil() as usize;
    // Buckets are named by a domain element when the domain is the smaller set.
    let name_bits = index_bits(m.min(n));
    let count_bits = index_bits((1.0 / beta).floor() as usize + 2);

    let mass_q = Quantizer::new(0.0, 1.0, e * beta)?;
    let sum_q = Quantizer::new(0.0, 1.0, e)?;
    let pt = heavy_truncate(p, e);
    let qt = heavy_truncate(q, e);
    let runs = amplification_runs(cfg.delta, BASE_FAILURE);

    let (estimate, ledger) = median_of_runs(runs, |run| {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, run as u64));
        let key: u64 = rng.random();
        let hp = hashed(pt.entries(), key, m);
        let hq = hashed(qt.entries(), key, m);

        let heavy: Vec<(usize, f64)> = hp
            .iter()
            .filter(|(_, v)| **v >= beta)
            .map(|(&b, &v)| (b, mass_q.quantize(v).decoded))
            .collect();
        let mut ledger = CostLedger::new();
        ledger.send(
            Party::Alice,
            count_bits + heavy.len() as u64 * (name_bits + mass_q.bits()),
            "eq/heavy",
        );

        let h: f64 = heavy.iter().map(|(b, v)| v * hq.get(b).copied().unwrap_or(0.0)).sum();
        let h = sum_q.quantize(h.min(1.0)).decoded;
        let norm: f64 = qt.entries().iter().map(|(_, v)| v).sum();
        let norm_sent = sum_q.quantize(norm).decoded;
        ledger.send_reals(Party::Bob, 2, &sum_q, "eq/norm and heavy sum");

        let mut light = 0.0;
        if norm > 0.0 {
            let qn = ProbVec::from_sparse(n, qt.entries().iter().map(|&(y, v)| (y, v / norm)))?;
            let sampler = qn.sampler();
            for _ in 0..t {
                let b = bucket(key, sampler.sample(&mut rng), m);
                let pb = hp.get(&b).copied().unwrap_or(0.0);
                if pb < beta {
                    light += pb;
                }
            }
            light *= norm_sent / t as f64;
        }
        // Fixed length: with nothing left after truncation the names are padding.
        ledger.send(Party::Bob, t as u64 * name_bits, "eq/samples");
        Ok((h + light, ledger))
    })?;
    Ok(EstimateReport::new(estimate, ledger, cfg.seed)
        .with_budget("truncation", 2.0 * e)
        .with_budget("heavy", mass_q.max_error() / beta + sum_q.max_error()))
}
