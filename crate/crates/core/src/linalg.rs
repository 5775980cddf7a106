//! Dense singular value decompositions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Thin SVD `A = U diag(sigma) V^T` with nonincreasing, strictly positive
/// singular values. Columns of `u` and `v` are the singular vectors.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn compute(a: &DMatrix<f64>) -> Result<Svd> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::SvdUnavailable("empty matrix".into()));
        }
        let svd = a.clone().svd(true, true);
        let u = svd.u.ok_or_else(|| Error::SvdUnavailable("no left vectors".into()))?;
        let vt = svd
            .v_t
            .ok_or_else(|| Error::SvdUnavailable("no right vectors".into()))?;
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let top = order
            .first()
            .map(|&i| svd.singular_values[i])
            .unwrap_or(0.0);
        let keep: Vec<usize> = order
            .into_iter()
            .filter(|&i| top > 0.0 && svd.singular_values[i] > RANK_TOLERANCE * top)
            .collect();
        let sigma = keep.iter().map(|&i| svd.singular_values[i]).collect();
        let u = DMatrix::from_fn(a.nrows(), keep.len(), |r, c| u[(r, keep[c])]);
        let v = DMatrix::from_fn(a.ncols(), keep.len(), |r, c| vt[(keep[c], r)]);
        Ok(Svd { u, sigma, v })
    }

    /// Wraps a known factorization after checking shapes and ordering.
    pub fn from_parts(u: DMatrix<f64>, sigma: Vec<f64>, v: DMatrix<f64>) -> Result<Svd> {
        if u.ncols() != sigma.len() || v.ncols() != sigma.len() {
            return Err(Error::SvdUnavailable("factor shapes disagree".into()));
        }
        if sigma.windows(2).any(|w| w[1] > w[0]) || sigma.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::SvdUnavailable(
                "singular values must be positive and nonincreasing".into(),
            ));
        }
        Ok(Svd { u, sigma, v })
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Sum of the leading `r` rank-one terms.
    pub fn reconstruct(&self, r: usize) -> DMatrix<f64> {
        let r = r.min(self.rank());
        let us = DMatrix::from_fn(self.u.nrows(), r, |i, j| self.u[(i, j)] * self.sigma[j]);
        let v = self.v.columns(0, r);
        us * v.transpose()
    }
}
