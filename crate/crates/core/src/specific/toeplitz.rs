//! Toeplitz functions `f(x, y) = a[x - y]` with few changes in `a`, written
//! as a constant plus shifted greater-than functions.

use super::gt::gt_protocol;
use crate::error::{Error, Result};
use crate::generic::BASE_FAILURE;
use crate::model::oracle::check_shapes;
use crate::model::{amplification_runs, CostLedger, EstimateReport, FamilySpec, ProbVec, ProtocolConfig, TargetFn};

/// `(coefficient, shift)` terms with `f(x, y) = a[0] + sum c 1[x + t >= y]`.
pub fn shifted_gt_terms(diagonals: &[f64]) -> Vec<(f64, i64)> {
    let n = (diagonals.len() as i64 + 1) / 2;
    diagonals
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] != w[0])
        .map(|(l, w)| (w[1] - w[0], n - 2 - l as i64))
        .collect()
}

pub fn toeplitz_protocol(p: &ProbVec, q: &ProbVec, f: &TargetFn, cfg: &ProtocolConfig) -> Result<EstimateReport> {
    check_shapes(p, q, f)?;
    let Some(FamilySpec::Toeplitz { diagonals }) = f.spec() else {
        return Err(Error::Precondition("not a Toeplitz family".into()));
    };
    let n = f.rows();
    let terms = shifted_gt_terms(diagonals);
    let base = diagonals[0];
    let mut ledger = CostLedger::new();
    if terms.is_empty() {
        return Ok(EstimateReport::new(base, ledger, cfg.seed));
    }
    let weight: f64 = terms.iter().map(|(c, _)| c.abs()).sum();
    let per_call = cfg.delta / terms.len() as f64;
    let delta_call = if amplification_runs(per_call, BASE_FAILURE) == 1 { cfg.delta } else { per_call };
    // Embed both sides in 0..3n so every shift stays in range.
    let offset = n as i64 - 1;
    let q_shift = ProbVec::from_sparse(3 * n, q.support().map(|(y, m)| (y + offset as usize, m)))?;
    let mut estimate = base;
    for (i, &(c, t)) in terms.iter().enumerate() {
        let p_shift = ProbVec::from_sparse(3 * n, p.support().map(|(x, m)| ((x as i64 + t + offset) as usize, m)))?;
        let child = cfg.child((cfg.epsilon / weight).min(0.999), i as u64 + 1).with_delta(delta_call);
        let r = gt_protocol(&p_shift, &q_shift, &child)?;
        estimate += c * r.estimate;
        ledger.extend(&r.ledger, &format!("term{i}"));
    }
    Ok(EstimateReport::new(estimate, ledger, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_family, exact_expectation};

    #[test]
    fn recombination_matches_entries() {
        let n = 6;
        let diagonals: Vec<f64> = (0..2 * n - 1).map(|l| if l < 3 { -0.5 } else if l < 8 { 1.0 } else { 0.25 }).collect();
        let f = build_family(FamilySpec::Toeplitz { diagonals: diagonals.clone() }).unwrap();
        let terms = shifted_gt_terms(&diagonals);
        assert_eq!(terms.len(), 2);
        for x in 0..n {
            for y in 0..n {
                let v: f64 = diagonals[0]
                    + terms
                        .iter()
                        .map(|&(c, t)| if x as i64 + t >= y as i64 { c } else { 0.0 })
                        .sum::<f64>();
                assert!((v - f.entry(x, y)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn protocol_within_eps() {
        let n = 64;
        let diagonals: Vec<f64> = (0..2 * n - 1).map(|l| if l < 50 { 0.0 } else if l < 90 { 1.0 } else { -0.5 }).collect();
        let f = build_family(FamilySpec::Toeplitz { diagonals }).unwrap();
        let p = ProbVec::from_weights(&(0..n).map(|i| (i % 9) as f64 + 1.0).collect::<Vec<_>>()).unwrap();
        let q = ProbVec::uniform(n).unwrap();
        let truth = exact_expectation(&p, &q, &f).unwrap();
        let mut fails = 0;
        for seed in 0..30 {
            let cfg = ProtocolConfig::new(0.1, 0.1, seed).unwrap();
            if (toeplitz_protocol(&p, &q, &f, &cfg).unwrap().estimate - truth).abs() > 0.1 {
                fails += 1;
            }
        }
        assert!(fails <= 10, "{fails}");
    }
}
