//! Heavy/light splitting with a sketched light part.
//!
//! Entries of `p` and `q` with mass at least `beta` are exchanged outright.
//! On the light parts `p^l, q^l` the bilinear form `p^l A q^l` equals
//! `<a, b>` with `a = S^{1/2} U^T p^l`, `b = S^{1/2} V^T q^l`, and since light
//! vectors have `|p^l|_2^2 <= beta` the sketch error `delta |a| |b|` is at
//! most `delta sigma beta`. The hybrid variant first sends the `t` leading
//! projections `<p^l, u_j>` exactly and sketches only the tail.

use super::ip_sketch::real_ip_sketch_from;
use super::BASE_FAILURE;
use crate::error::{invalid, Result};
use crate::linalg::Svd;
use crate::model::oracle::check_shapes;
use crate::model::{
    amplification_runs, derive_seed, index_bits, median_of_runs, rng_from_seed, CostLedger,
    EstimateReport, Party, ProbVec, ProtocolConfig, Quantizer, TargetFn,
};

/// Parameters of one spectral run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPlan {
    /// Heaviness threshold.
    pub beta: f64,
    /// Leading singular directions sent exactly.
    pub t_cut: usize,
    /// Rademacher vectors in the light-part sketch (0 if there is no tail).
    pub sketch_dim: usize,
    /// Relative error asked of the sketch.
    pub sketch_delta: f64,
    /// Precision of each exactly sent projection.
    pub exact_precision: f64,
    pub budget_heavy: f64,
    pub budget_exact: f64,
    pub budget_sketch: f64,
}

impl SpectralPlan {
    pub fn new(svd: &Svd, cfg: &ProtocolConfig, t: usize) -> Result<Self> {
        let rank = svd.rank();
        if t > rank {
            return Err(invalid("t", format!("{t} exceeds rank {rank}")));
        }
        let eps = cfg.epsilon;
        let c = cfg.constant("spectral.beta", 1.0);
        let sketch_c = cfg.constant("spectral.sketch", 100.0);
        let has_tail = t < rank;
        let (budget_exact, budget_sketch) = match (t, has_tail) {
            (0, _) => (0.0, eps / 2.0),
            (_, true) => (eps / 4.0, eps / 4.0),
            (_, false) => (eps / 2.0, 0.0),
        };
        let (beta, sketch_delta, sketch_dim) = if has_tail {
            let sigma = svd.sigma[t];
            let beta = (c * (eps / sigma).powf(2.0 / 3.0)).min(1.0);
            let delta = budget_sketch / (sigma * beta);
            (beta, delta, ((sketch_c / (delta * delta)).ceil() as usize).max(1))
        } else {
            (1.0, 0.0, 0)
        };
        let exact_precision = if t > 0 {
            4.0 * budget_exact / (svd.spectral_norm() * t as f64)
        } else {
            0.0
        };
        Ok(Self {
            beta,
            t_cut: t,
            sketch_dim,
            sketch_delta,
            exact_precision,
            budget_heavy: eps / 2.0,
            budget_exact,
            budget_sketch,
        })
    }
}

/// Spectral protocol: the hybrid with no exactly sent directions.
pub fn spectral_protocol(p: &ProbVec, q: &ProbVec, f: &TargetFn, cfg: &ProtocolConfig) -> Result<EstimateReport> {
    spectral_hybrid_protocol(p, q, f, cfg, 0)
}

fn split(p: &ProbVec, beta: f64) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
    p.support().partition(|&(_, m)| m >= beta)
}

fn heavy_list_bits(count: usize, domain: usize, mass: &Quantizer) -> u64 {
    index_bits(domain + 1) + count as u64 * (index_bits(domain) + mass.bits())
}

/// Bob sends his heavy entries. Alice replies with her heavy entries, the
/// quantized cross term `p^l A q~^h`, the `t` leading projections of `p^l`
/// and the sketch of her tail vector. Bob outputs.
pub fn spectral_hybrid_protocol(
    p: &ProbVec,
    q: &ProbVec,
    f: &TargetFn,
    cfg: &ProtocolConfig,
    t: usize,
) -> Result<EstimateReport> {
    check_shapes(p, q, f)?;
    let svd = f.svd()?;
    let plan = SpectralPlan::new(&svd, cfg, t)?;
    let eps = cfg.epsilon;
    let rank = svd.rank();

    let mass_q = Quantizer::new(0.0, 1.0, eps * plan.beta / 4.0)?;
    let cross_q = Quantizer::new(-2.0, 2.0, eps / 8.0)?;
    let (heavy_p, light_p) = split(p, plan.beta);
    let (heavy_q, light_q) = split(q, plan.beta);
    let heavy_p: Vec<(usize, f64)> = heavy_p.into_iter().map(|(x, m)| (x, mass_q.quantize(m).decoded)).collect();
    let heavy_q: Vec<(usize, f64)> = heavy_q.into_iter().map(|(y, m)| (y, mass_q.quantize(m).decoded)).collect();

    // Bob: p~^h A q. Alice: p^l A q~^h.
    let t1: f64 = heavy_p
        .iter()
        .map(|&(x, m)| m * q.support().map(|(y, qy)| qy * f.entry(x, y)).sum::<f64>())
        .sum();
    let t2: f64 = light_p
        .iter()
        .map(|&(x, m)| m * heavy_q.iter().map(|&(y, qy)| qy * f.entry(x, y)).sum::<f64>())
        .sum();
    let t2 = cross_q.quantize(t2).decoded;
    let heavy_bound = (heavy_p.len() + heavy_q.len()) as f64 * mass_q.max_error() + cross_q.max_error();
    debug_assert!(heavy_bound <= plan.budget_heavy);

    let project = |light: &[(usize, f64)], basis: &nalgebra::DMatrix<f64>, j: usize| -> f64 {
        light.iter().map(|&(i, m)| m * basis[(i, j)]).sum()
    };

    let mut base = CostLedger::new();
    base.send(Party::Bob, heavy_list_bits(heavy_q.len(), f.cols(), &mass_q), "heavy/list");
    base.send(Party::Alice, heavy_list_bits(heavy_p.len(), f.rows(), &mass_q), "heavy/list");
    base.send_reals(Party::Alice, 1, &cross_q, "heavy/cross");

    let mut exact = 0.0;
    if t > 0 {
        let quant = Quantizer::unit(plan.exact_precision)?;
        for j in 0..t {
            let a = quant.quantize(project(&light_p, &svd.u, j)).decoded;
            exact += svd.sigma[j] * a * project(&light_q, &svd.v, j);
        }
        base.send_reals(Party::Alice, t, &quant, "exact/projections");
    }

    let fixed = t1 + t2 + exact;
    let (estimate, ledger) = if t < rank {
        let a: Vec<f64> = (t..rank).map(|j| svd.sigma[j].sqrt() * project(&light_p, &svd.u, j)).collect();
        let b: Vec<f64> = (t..rank).map(|j| svd.sigma[j].sqrt() * project(&light_q, &svd.v, j)).collect();
        let sketch_c = cfg.constant("spectral.sketch", 100.0);
        let runs = amplification_runs(cfg.delta, BASE_FAILURE);
        median_of_runs(runs, |run| {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, run as u64));
            let (s, l) = real_ip_sketch_from(Party::Alice, &a, &b, plan.sketch_delta, sketch_c, &mut rng)?;
            let mut ledger = base.clone();
            ledger.extend(&l, "");
            Ok((fixed + s, ledger))
        })?
    } else {
        (fixed, base)
    };

    Ok(EstimateReport::new(estimate, ledger, cfg.seed)
        .with_budget("heavy", heavy_bound)
        .with_budget("exact", plan.budget_exact)
        .with_budget("sketch", plan.sketch_delta * if t < rank { svd.sigma[t] } else { 0.0 } * plan.beta))
}
