use crate::error::{invalid, Error, Result};
use crate::model::{CostLedger, EstimateReport, Party, ProbVec, ProtocolConfig, Quantizer, SignedVec, TargetFn};

/// A protocol on probability vectors, as accepted by [`signed_extension`].
pub type Protocol<'a> = dyn Fn(&ProbVec, &ProbVec, &TargetFn, &ProtocolConfig) -> Result<EstimateReport> + 'a;

fn normalized(domain: usize, part: &[(usize, f64)]) -> Result<Option<(ProbVec, f64)>> {
    let norm: f64 = part.iter().map(|(_, v)| v).sum();
    if part.is_empty() || norm == 0.0 {
        return Ok(None);
    }
    let p = ProbVec::from_sparse(domain, part.iter().map(|&(i, v)| (i, v / norm)))?;
    Ok(Some((p, norm)))
}

/// Estimates `p~^T A q~` for real vectors by running `protocol` on the four
/// normalized sign parts and recombining with the part norms.
///
/// Alice sends the norms of her two parts at precision `eps` (window
/// `[0, 2^e]`, the exponent `e` in 8 bits); the result is within
/// `eps (|p~|_1 |q~|_1 + |p~|_1 + |q~|_1)` when every sub-run succeeds.
pub fn signed_extension(
    protocol: &Protocol<'_>,
    p: &SignedVec,
    q: &SignedVec,
    f: &TargetFn,
    cfg: &ProtocolConfig,
) -> Result<EstimateReport> {
    if p.l1_norm() == 0.0 || q.l1_norm() == 0.0 {
        return Err(invalid("signed vector", "zero vector"));
    }
    if p.domain_size() != f.rows() {
        return Err(Error::DimensionMismatch {
            what: "p domain vs f rows",
            expected: f.rows(),
            got: p.domain_size(),
        });
    }
    if q.domain_size() != f.cols() {
        return Err(Error::DimensionMismatch {
            what: "q domain vs f cols",
            expected: f.cols(),
            got: q.domain_size(),
        });
    }
    let eps = cfg.epsilon;
    let (pp, pn) = p.split();
    let (qp, qn) = q.split();
    let p_parts = [normalized(f.rows(), &pp)?, normalized(f.rows(), &pn)?];
    let q_parts = [normalized(f.cols(), &qp)?, normalized(f.cols(), &qn)?];

    let exponent = p.l1_norm().log2().ceil().max(0.0);
    let norm_q = Quantizer::new(0.0, 2f64.powf(exponent), eps)?;
    let mut ledger = CostLedger::new();
    ledger.send(Party::Alice, 8, "signed/norm exponent");
    ledger.send_reals(Party::Alice, 2, &norm_q, "signed/norms");

    let mut estimate = 0.0;
    for (si, ps) in p_parts.iter().enumerate() {
        for (ti, qs) in q_parts.iter().enumerate() {
            let (Some((pv, pnorm)), Some((qv, qnorm))) = (ps, qs) else {
                continue;
            };
            let sign = if si == ti { 1.0 } else { -1.0 };
            let child = cfg.child(eps, (2 * si + ti) as u64 + 1);
            let r = protocol(pv, qv, f, &child)?;
            estimate += sign * norm_q.quantize(*pnorm).decoded * qnorm * r.estimate;
            ledger.extend(&r.ledger, &format!("part{si}{ti}"));
        }
    }
    let bound = eps * (p.l1_norm() * q.l1_norm() + p.l1_norm() + q.l1_norm());
    Ok(EstimateReport::new(estimate, ledger, cfg.seed).with_budget("signed", bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generic::svd_protocol;
    use crate::model::{build_family, exact_expectation, FamilySpec};

    #[test]
    fn probability_inputs_pass_through() {
        let f = build_family(FamilySpec::Hadamard { k: 8 }).unwrap();
        let p = ProbVec::from_weights(&[1.0, 2.0, 0.0, 1.0, 3.0, 0.5, 0.5, 2.0]).unwrap();
        let q = ProbVec::uniform(8).unwrap();
        let cfg = ProtocolConfig::new(0.05, 0.1, 0).unwrap();
        let proto = |p: &ProbVec, q: &ProbVec, f: &TargetFn, c: &ProtocolConfig| svd_protocol(p, q, f, c, 8);
        let direct = proto(&p, &q, &f, &cfg).unwrap();
        let wrapped = signed_extension(&proto, &SignedVec::from(&p), &SignedVec::from(&q), &f, &cfg).unwrap();
        assert!((direct.estimate - wrapped.estimate).abs() <= 0.05);
        let truth = exact_expectation(&p, &q, &f).unwrap();
        let neg = signed_extension(&proto, &SignedVec::from(&p).negate(), &SignedVec::from(&q), &f, &cfg).unwrap();
        assert!((neg.estimate + truth).abs() <= neg.budget_term("signed").unwrap());
    }

    #[test]
    fn zero_vector_rejected() {
        let f = build_family(FamilySpec::Eq { size: 2 }).unwrap();
        let z = SignedVec::from_dense(&[0.0, 0.0]).unwrap();
        let o = SignedVec::from_dense(&[1.0, 0.0]).unwrap();
        let cfg = ProtocolConfig::new(0.1, 0.1, 0).unwrap();
        let proto = |p: &ProbVec, q: &ProbVec, f: &TargetFn, c: &ProtocolConfig| svd_protocol(p, q, f, c, 2);
        assert!(signed_extension(&proto, &z, &o, &f, &cfg).is_err());
    }
}
