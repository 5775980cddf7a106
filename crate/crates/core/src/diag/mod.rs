//! Spectral and combinatorial diagnostics for small matrices.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::model::oracle::check_shapes;
use crate::model::{build_family, FamilySpec, ProbVec, TargetFn, DENSE_CAP};
use crate::par::{max_by_range, Execution};

/// Row count above which [`brute_force_discrepancy`] refuses to enumerate.
pub const DISCREPANCY_ROW_CAP: usize = 24;

/// Singular values of a function and the reciprocal sums built from them.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSummary {
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub spectral_norm: f64,
    /// `lambda[t - 1] = sum_{i <= t} 1 / sigma_i`.
    pub lambda: Vec<f64>,
    pub frobenius: f64,
}

impl SpectralSummary {
    pub fn from_singular_values(singular_values: Vec<f64>, frobenius: f64) -> Self {
        let lambda = singular_values
            .iter()
            .scan(0.0, |acc, s| {
                *acc += 1.0 / s;
                Some(*acc)
            })
            .collect();
        Self {
            rank: singular_values.len(),
            spectral_norm: singular_values.first().copied().unwrap_or(0.0),
            singular_values,
            lambda,
            frobenius,
        }
    }

    /// `lambda_t` for `1 <= t <= rank`.
    pub fn lambda_at(&self, t: usize) -> f64 {
        self.lambda[t - 1]
    }
}

pub fn svd_summary(f: &TargetFn) -> Result<SpectralSummary> {
    let dense = f.dense_capped(DENSE_CAP)?;
    let svd = f.svd()?;
    let residual = (svd.reconstruct(svd.rank()) - dense).norm();
    let tol = 1e-8 * f.rows().max(f.cols()) as f64;
    if residual > tol {
        return Err(Error::SvdUnavailable(format!(
            "reconstruction residual {residual:.3e} exceeds {tol:.3e}"
        )));
    }
    Ok(SpectralSummary::from_singular_values(svd.sigma.clone(), dense.norm()))
}

/// Margins `lambda_t - t^{3/2} / k` for `t = 1..=rank`.
///
/// Fails on the first `t` whose margin is below `-1e-9`.
pub fn lambda_bound_check(summary: &SpectralSummary, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(invalid("k", "must be positive"));
    }
    let mut margins = Vec::with_capacity(summary.rank);
    for (i, &lambda) in summary.lambda.iter().enumerate() {
        let t = (i + 1) as f64;
        let floor = t.powf(1.5) / k as f64;
        if lambda < floor - 1e-9 {
            return Err(Error::LambdaFloorViolated { t: i + 1, lambda, floor });
        }
        margins.push(lambda - floor);
    }
    Ok(margins)
}

/// Result of [`path_distance_inverse_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceInverseCheck {
    pub k: usize,
    /// `max |E_k E_k^{-1} - I|` with the closed-form inverse.
    pub residual: f64,
    /// `lambda_k` of `D_k = E_k / k`.
    pub lambda_k: f64,
    /// `sqrt(3/2) k^2`.
    pub bound: f64,
}

impl DistanceInverseCheck {
    pub fn within_bound(&self) -> bool {
        self.lambda_k <= self.bound + 1e-6
    }
}

/// Inverse of `E_k = (|i - j|)` from the Laplacian of the path on `k` nodes.
pub fn path_distance_inverse(k: usize) -> DMatrix<f64> {
    let mut inv = DMatrix::zeros(k, k);
    for i in 0..k {
        let degree = if i == 0 || i + 1 == k { 1.0 } else { 2.0 };
        inv[(i, i)] = -0.5 * degree;
        if i + 1 < k {
            inv[(i, i + 1)] = 0.5;
            inv[(i + 1, i)] = 0.5;
        }
    }
    let w = 1.0 / (2.0 * (k as f64 - 1.0));
    for a in [0, k - 1] {
        for b in [0, k - 1] {
            inv[(a, b)] += w;
        }
    }
    inv
}

pub fn path_distance_inverse_check(k: usize) -> Result<DistanceInverseCheck> {
    if k < 2 {
        return Err(invalid("k", format!("need k >= 2, got {k}")));
    }
    let e = DMatrix::from_fn(k, k, |i, j| i.abs_diff(j) as f64);
    let residual = (&e * path_distance_inverse(k) - DMatrix::identity(k, k)).amax();
    let summary = svd_summary(&build_family(FamilySpec::Distance { k })?)?;
    Ok(DistanceInverseCheck {
        k,
        residual,
        lambda_k: *summary.lambda.last().expect("distance matrices have full rank"),
        bound: 1.5f64.sqrt() * (k * k) as f64,
    })
}

/// Best rectangle for a fixed product distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport {
    pub value: f64,
    pub witness_rows: Vec<usize>,
    pub witness_cols: Vec<usize>,
    pub theta: (ProbVec, ProbVec),
}

/// `|sum_{x in R, y in C} theta_x(x) theta_y(y) f(x, y)|`.
pub fn rectangle_bias(f: &TargetFn, theta_x: &ProbVec, theta_y: &ProbVec, rows: &[usize], cols: &[usize]) -> f64 {
    rows.iter()
        .map(|&x| {
            theta_x.get(x) * cols.iter().map(|&y| theta_y.get(y) * f.entry(x, y)).sum::<f64>()
        })
        .sum::<f64>()
        .abs()
}

pub fn brute_force_discrepancy(f: &TargetFn, theta_x: &ProbVec, theta_y: &ProbVec) -> Result<DiscrepancyReport> {
    brute_force_discrepancy_with(f, theta_x, theta_y, Execution::default())
}

/// Enumerates every row subset; the best column set for a fixed row set is
/// the positive or the negative part of the weighted column sums.
pub fn brute_force_discrepancy_with(
    f: &TargetFn,
    theta_x: &ProbVec,
    theta_y: &ProbVec,
    exec: Execution,
) -> Result<DiscrepancyReport> {
    check_shapes(theta_x, theta_y, f)?;
    let (rows, cols) = (f.rows(), f.cols());
    if rows > DISCREPANCY_ROW_CAP {
        return Err(Error::SizeCapExceeded { rows, cols, cap: DISCREPANCY_ROW_CAP });
    }
    let weighted: Vec<Vec<f64>> = (0..rows)
        .map(|x| (0..cols).map(|y| theta_x.get(x) * theta_y.get(y) * f.entry(x, y)).collect())
        .collect();
    let chunk_bits = rows.min(12);
    let chunks = 1usize << (rows - chunk_bits);

    // Within a chunk the low bits walk a Gray code, so each step adds or
    // removes one row.
    let best = max_by_range(chunks, exec, |chunk| {
        let high = chunk << chunk_bits;
        let mut c = vec![0.0; cols];
        for (x, row) in weighted.iter().enumerate().skip(chunk_bits) {
            if (high >> x) & 1 == 1 {
                c.iter_mut().zip(row).for_each(|(a, b)| *a += b);
            }
        }
        let score = |c: &[f64]| {
            let pos: f64 = c.iter().filter(|v| **v > 0.0).sum();
            let neg: f64 = -c.iter().filter(|v| **v < 0.0).sum::<f64>();
            if neg > pos {
                (neg, false)
            } else {
                (pos, true)
            }
        };
        let (v, s) = score(&c);
        let mut best = (v, high, s);
        let mut gray = 0usize;
        for step in 1..(1usize << chunk_bits) {
            let bit = step.trailing_zeros() as usize;
            gray ^= 1 << bit;
            let row = &weighted[bit];
            if (gray >> bit) & 1 == 1 {
                c.iter_mut().zip(row).for_each(|(a, b)| *a += b);
            } else {
                c.iter_mut().zip(row).for_each(|(a, b)| *a -= b);
            }
            let (v, s) = score(&c);
            if v > best.0 {
                best = (v, high | gray, s);
            }
        }
        Ordered(best)
    })
    .expect("at least one chunk")
    .1
     .0;

    let (_, mask, positive) = best;
    let witness_rows: Vec<usize> = (0..rows).filter(|x| (mask >> x) & 1 == 1).collect();
    let witness_cols: Vec<usize> = (0..cols)
        .filter(|&y| {
            let c: f64 = witness_rows.iter().map(|&x| weighted[x][y]).sum();
            if positive {
                c > 0.0
            } else {
                c < 0.0
            }
        })
        .collect();
    let value = rectangle_bias(f, theta_x, theta_y, &witness_rows, &witness_cols);
    Ok(DiscrepancyReport {
        value,
        witness_rows,
        witness_cols,
        theta: (theta_x.clone(), theta_y.clone()),
    })
}

/// Orders candidates by value only.
struct Ordered((f64, usize, bool));

impl PartialEq for Ordered {
    fn eq(&self, other: &Self) -> bool {
        self.0 .0 == other.0 .0
    }
}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.0 .0.partial_cmp(&other.0 .0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_hadamard() {
        for k in [4, 16, 64] {
            let s = svd_summary(&build_family(FamilySpec::Eq { size: k }).unwrap()).unwrap();
            for t in 1..=k {
                assert!((s.lambda_at(t) - t as f64).abs() < 1e-9);
            }
            let h = svd_summary(&build_family(FamilySpec::Hadamard { k }).unwrap()).unwrap();
            let margins = lambda_bound_check(&h, k).unwrap();
            assert!(margins[k - 1].abs() < 1e-9);
        }
    }

    #[test]
    fn small_inverse() {
        let c = path_distance_inverse_check(2).unwrap();
        assert!(c.residual <= 1e-12);
        assert!(c.within_bound());
        assert!(path_distance_inverse_check(1).is_err());
    }

    #[test]
    fn constant_function_full_rectangle() {
        let f = TargetFn::from_dense(DMatrix::from_element(4, 3, 1.0)).unwrap();
        let r = brute_force_discrepancy(&f, &ProbVec::uniform(4).unwrap(), &ProbVec::uniform(3).unwrap()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.witness_rows, vec![0, 1, 2, 3]);
        assert_eq!(r.witness_cols, vec![0, 1, 2]);
    }

    #[test]
    fn modes_agree_on_wide_enumeration() {
        let f = build_family(FamilySpec::RandomBoolean { n: 4, seed: 5 }).unwrap();
        let u = ProbVec::uniform(16).unwrap();
        let a = brute_force_discrepancy_with(&f, &u, &u, Execution::Sequential).unwrap();
        let b = brute_force_discrepancy_with(&f, &u, &u, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
