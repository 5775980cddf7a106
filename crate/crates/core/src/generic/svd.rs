use crate::error::{invalid, Error, Result};
use crate::model::oracle::check_shapes;
use crate::model::{index_bits, CostLedger, EstimateReport, Party, ProbVec, ProtocolConfig, Quantizer, TargetFn};

/// Deterministic low-rank protocol.
///
/// `f` is replaced by its rank-`r` truncated SVD, which must be within
/// `eps / 2` of `f` in every entry. Alice sends `p^T u_i` for `i <= r`
/// at precision `eps / 2^(n+1)` (`n = ceil(log2 N)`), and Bob outputs
/// `sum_i sigma_i <p, u_i> <v_i, q>`.
pub fn svd_protocol(
    p: &ProbVec,
    q: &ProbVec,
    f: &TargetFn,
    cfg: &ProtocolConfig,
    r: usize,
) -> Result<EstimateReport> {
    check_shapes(p, q, f)?;
    if r == 0 {
        return Err(invalid("r", "rank must be positive"));
    }
    let eps = cfg.epsilon;
    let svd = f.svd()?;
    let r = r.min(svd.rank());
    let dense = f.dense()?;
    let achieved = (svd.reconstruct(r) - dense).amax();
    if achieved > eps / 2.0 {
        return Err(Error::RankCheckFailed {
            rank: r,
            achieved,
            budget: eps / 2.0,
        });
    }

    let n = index_bits(f.rows().max(f.cols())) as i32;
    let mut eta = eps / 2f64.powi(n + 1);
    // Quantization error is at most sum_i sigma_i * eta / 4; keep it <= eps / 2.
    let sigma_sum: f64 = svd.sigma[..r].iter().sum();
    if sigma_sum * eta / 4.0 > eps / 2.0 {
        eta = 2.0 * eps / sigma_sum;
    }
    let quant = Quantizer::unit(eta)?;

    let mut estimate = 0.0;
    for i in 0..r {
        let pu: f64 = p.support().map(|(x, m)| m * svd.u[(x, i)]).sum();
        let vq: f64 = q.support().map(|(y, m)| m * svd.v[(y, i)]).sum();
        estimate += svd.sigma[i] * quant.quantize(pu).decoded * vq;
    }
    let mut ledger = CostLedger::new();
    ledger.send_reals(Party::Alice, r, &quant, "svd/projections");
    Ok(EstimateReport::new(estimate, ledger, cfg.seed)
        .with_budget("truncation", achieved)
        .with_budget("quantization", sigma_sum * quant.max_error()))
}
