use super::BASE_FAILURE;
use crate::error::Result;
use crate::model::oracle::check_shapes;
use crate::model::{
    amplification_runs, derive_seed, index_bits, median_of_runs, rng_from_seed, CostLedger, EstimateReport,
    FamilySpec, Party, ProbVec, ProtocolConfig, Quantizer, TargetFn,
};

/// Independent sample pairs: Alice draws `x_i ~ p`, Bob draws `y_i ~ q`,
/// and each `f(x_i, y_i)` is evaluated by a one-way exchange (Alice sends
/// `x_i`, Bob answers with `f(x_i, y_i)` at precision `eps / 2`). The
/// estimate is the mean of the answers.
///
/// For the double-index family each pair is evaluated exactly with
/// `2k + 1` bits instead.
pub fn random_sampling_protocol(
    p: &ProbVec,
    q: &ProbVec,
    f: &TargetFn,
    cfg: &ProtocolConfig,
) -> Result<EstimateReport> {
    check_shapes(p, q, f)?;
    let eps = cfg.epsilon;
    let k = (cfg.constant("sampling.k", 4.0) / (eps * eps)).ceil() as usize;
    let runs = amplification_runs(cfg.delta, BASE_FAILURE);
    let (sp, sq) = (p.sampler(), q.sampler());
    let di = match f.spec() {
        Some(FamilySpec::DoubleIndex { k }) => Some(*k),
        _ => None,
    };
    let quant = Quantizer::unit(eps / 2.0)?;

    let (estimate, ledger) = median_of_runs(runs, |run| {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, run as u64));
        let mut ledger = CostLedger::new();
        let mut sum = 0.0;
        for _ in 0..k {
            let x = sp.sample(&mut rng);
            let y = sq.sample(&mut rng);
            sum += match di {
                Some(_) => f.entry(x, y),
                None => quant.quantize(f.entry(x, y)).decoded,
            };
        }
        match di {
            Some(dk) => {
                // Alice sends each i; Bob answers with j and the bit y_i, and
                // Alice then knows x_j * y_i.
                let idx = dk as u64;
                ledger.send(Party::Alice, k as u64 * idx, "sampling/indices");
                ledger.send(Party::Bob, k as u64 * (idx + 1), "sampling/indices and bits");
            }
            None => {
                ledger.send(Party::Alice, k as u64 * index_bits(f.rows()), "sampling/inputs");
                ledger.send_reals(Party::Bob, k, &quant, "sampling/values");
            }
        }
        Ok((sum / k as f64, ledger))
    })?;
    Ok(EstimateReport::new(estimate, ledger, cfg.seed))
}
