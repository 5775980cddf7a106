//! Matrices with few nonzeros per row, reduced to equality.
//!
//! Row `x`'s `l`-th nonzero defines the `l`-th one-sparse matrix. Each entry
//! is split by sign and written in binary, `|v| ~ sum_d b_d 2^-d`, giving
//! 0/1 one-sparse pieces. A 0/1 one-sparse piece is a partial map `phi` and
//! `p^T M q = <phi_* p, q>`, an equality instance on one extra domain value
//! that absorbs the unmapped rows.

use super::eq::eq_protocol;
use crate::error::{Error, Result};
use crate::model::oracle::check_shapes;
use crate::model::{amplification_runs, CostLedger, EstimateReport, ProbVec, ProtocolConfig, TargetFn};
use crate::generic::BASE_FAILURE;

struct Piece {
    sign: f64,
    weight: f64,
    /// `(row, column)` pairs where the piece is 1.
    map: Vec<(usize, usize)>,
}

fn decompose(f: &TargetFn, eps: f64) -> Result<(usize, Vec<Piece>)> {
    let dense = f.dense()?;
    let rows: Vec<Vec<(usize, f64)>> = (0..f.rows())
        .map(|x| {
            (0..f.cols())
                .filter(|&y| dense[(x, y)] != 0.0)
                .map(|y| (y, dense[(x, y)]))
                .collect()
        })
        .collect();
    let s = rows.iter().map(Vec::len).max().unwrap_or(0);
    let depth = ((4.0 * s.max(1) as f64 / eps).log2().ceil()).max(0.0) as i32;
    let mut pieces = Vec::new();
    for l in 0..s {
        for sign in [1.0, -1.0] {
            for d in 0..=depth {
                let unit = 2f64.powi(-d);
                let map: Vec<(usize, usize)> = rows
                    .iter()
                    .enumerate()
                    .filter_map(|(x, r)| r.get(l).map(|&(y, v)| (x, y, v)))
                    .filter(|&(_, _, v)| v * sign > 0.0 && digit(v.abs(), d) == 1)
                    .map(|(x, y, _)| (x, y))
                    .collect();
                if !map.is_empty() {
                    pieces.push(Piece { sign, weight: unit, map });
                }
            }
        }
    }
    Ok((s, pieces))
}

/// Digit `d` of the greedy binary expansion of `v` in `[0, 1]` with
/// place values `1, 1/2, 1/4, ...`.
fn digit(v: f64, d: i32) -> u8 {
    let mut r = v;
    for i in 0..=d {
        let unit = 2f64.powi(-i);
        let bit = r >= unit;
        if bit {
            r -= unit;
        }
        if i == d {
            return u8::from(bit);
        }
    }
    0
}

pub fn sparse_protocol(p: &ProbVec, q: &ProbVec, f: &TargetFn, cfg: &ProtocolConfig) -> Result<EstimateReport> {
    check_shapes(p, q, f)?;
    let eps = cfg.epsilon;
    let (s, pieces) = decompose(f, eps)?;
    let limit = cfg.constant("sparse.max_s", f64::INFINITY);
    if s as f64 > limit {
        return Err(Error::Precondition(format!("{s} nonzeros in a row exceeds the bound {limit}")));
    }
    let mut ledger = CostLedger::new();
    if pieces.is_empty() {
        return Ok(EstimateReport::new(0.0, ledger, cfg.seed));
    }
    let eps_piece = 3.0 * eps / (16.0 * s as f64);
    // Each call's median run count is chosen so all calls succeed together
    // with probability 1 - delta.
    let per_call = cfg.delta / pieces.len() as f64;
    let runs = amplification_runs(per_call, BASE_FAILURE);
    let delta_call = if runs == 1 { cfg.delta } else { per_call };

    let n = f.cols();
    let q_ext = ProbVec::from_sparse(n + 1, q.support())?;
    let mut estimate = 0.0;
    for (i, piece) in pieces.iter().enumerate() {
        let mut target = vec![n; f.rows()];
        for &(x, y) in &piece.map {
            target[x] = y;
        }
        let pushed = ProbVec::from_sparse(n + 1, p.support().map(|(x, m)| (target[x], m)))?;
        let child = cfg.child(eps_piece, i as u64 + 1).with_delta(delta_call);
        let r = eq_protocol(&pushed, &q_ext, &child)?;
        estimate += piece.sign * piece.weight * r.estimate;
        ledger.extend(&r.ledger, &format!("piece{i}"));
    }
    Ok(EstimateReport::new(estimate, ledger, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_family, exact_expectation, FamilySpec};
    use nalgebra::DMatrix;

    #[test]
    fn binary_digits() {
        assert_eq!(digit(1.0, 0), 1);
        assert_eq!(digit(0.75, 0), 0);
        assert_eq!(digit(0.75, 1), 1);
        assert_eq!(digit(0.75, 2), 1);
        assert_eq!(digit(0.75, 3), 0);
    }

    #[test]
    fn eq_is_a_single_piece() {
        let f = build_family(FamilySpec::Eq { size: 64 }).unwrap();
        let (s, pieces) = decompose(&f, 0.05).unwrap();
        assert_eq!((s, pieces.len()), (1, 1));
    }

    #[test]
    fn permutation_matrix() {
        let n = 64;
        let perm: Vec<usize> = (0..n).map(|x| (x * 37 + 5) % n).collect();
        let f = TargetFn::from_dense(DMatrix::from_fn(n, n, |x, y| f64::from(u8::from(perm[x] == y)))).unwrap();
        let p = ProbVec::from_weights(&(0..n).map(|i| ((i % 7) + 1) as f64).collect::<Vec<_>>()).unwrap();
        let q = ProbVec::from_weights(&(0..n).map(|i| ((i % 5) + 1) as f64).collect::<Vec<_>>()).unwrap();
        let want: f64 = (0..n).map(|x| p.get(x) * q.get(perm[x])).sum();
        assert!((exact_expectation(&p, &q, &f).unwrap() - want).abs() < 1e-12);
        let mut fails = 0;
        for seed in 0..30 {
            let cfg = ProtocolConfig::new(0.05, 0.1, seed).unwrap();
            if (sparse_protocol(&p, &q, &f, &cfg).unwrap().estimate - want).abs() > 0.05 {
                fails += 1;
            }
        }
        assert!(fails <= 3, "{fails} failures");
    }
}
