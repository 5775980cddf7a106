//! Convex 1-Lipschitz functions as mixtures of absolute values.
//!
//! A convex `g` on `[0, 1]` with `|g'| <= 1` equals `c + E_{z~D}|x - z|`
//! where `D` has CDF `(1 + g'_+) / 2`. On a grid the right derivative is the
//! forward difference, and the identity holds exactly at grid points.

use super::abs::abs_protocol;
use crate::error::{Error, Result};
use crate::model::oracle::check_shapes;
use crate::model::{CostLedger, EstimateReport, Party, ProbVec, ProtocolConfig, Quantizer, TargetFn};

const SLACK: f64 = 1e-9;

/// `D` as a step CDF on the grid `{i / m}`, with the shift `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexMeasure {
    /// `F(i / m)` for `i = 0..=m`.
    pub cdf: Vec<f64>,
    pub shift: f64,
}

impl ConvexMeasure {
    pub fn grid(&self) -> usize {
        self.cdf.len() - 1
    }

    /// Point masses of `D` on the grid.
    pub fn masses(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cdf
            .iter()
            .map(|&c| {
                let m = (c - prev).max(0.0);
                prev = c;
                m
            })
            .collect()
    }

    /// `c + E_{z~D}|x - z|`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let m = self.grid() as f64;
        let spread: f64 = self
            .masses()
            .iter()
            .enumerate()
            .map(|(i, w)| w * (x - i as f64 / m).abs())
            .sum();
        self.shift + spread
    }

    pub fn to_prob(&self) -> Result<ProbVec> {
        ProbVec::from_weights(&self.masses())
    }
}

/// Decomposes grid values `values[i] = g(i / m)` of a convex 1-Lipschitz
/// function.
pub fn convex_to_measure(values: &[f64]) -> Result<ConvexMeasure> {
    if values.len() < 2 {
        return Err(Error::NotConvexLipschitz {
            cell: 0,
            reason: "need at least two grid points".into(),
        });
    }
    let m = values.len() - 1;
    let mut slopes = Vec::with_capacity(m);
    for i in 0..m {
        let s = (values[i + 1] - values[i]) * m as f64;
        if !s.is_finite() || s.abs() > 1.0 + SLACK {
            return Err(Error::NotConvexLipschitz {
                cell: i,
                reason: format!("slope {s} exceeds 1 in magnitude"),
            });
        }
        if let Some(&prev) = slopes.last() {
            if s < prev - SLACK {
                return Err(Error::NotConvexLipschitz {
                    cell: i,
                    reason: format!("slope decreases from {prev} to {s}"),
                });
            }
        }
        slopes.push(s.clamp(-1.0, 1.0));
    }
    let mut cdf: Vec<f64> = slopes.iter().map(|s| (1.0 + s) / 2.0).collect();
    // Monotone up to the slack; the last point carries the remaining mass.
    for i in 1..cdf.len() {
        cdf[i] = cdf[i].max(cdf[i - 1]);
    }
    cdf.push(1.0);
    let mut measure = ConvexMeasure { cdf, shift: 0.0 };
    let mean: f64 = measure
        .masses()
        .iter()
        .enumerate()
        .map(|(i, w)| w * i as f64 / m as f64)
        .sum();
    measure.shift = values[0] - mean;
    Ok(measure)
}

/// `E f(x, y)` for `f` convex and 1-Lipschitz in `y` on the grid `{i / m}`.
///
/// Alice decomposes each slice `f(x, .) = c_x + E_{D_x}|y - z|`, sends
/// `sum_x p(x) c_x` at precision `eps / 4`, and the parties run the
/// absolute-difference protocol on the mixture `D = sum_x p(x) D_x` and
/// `q` at error `3 eps / 4`.
pub fn convex_lipschitz_protocol(
    p: &ProbVec,
    q: &ProbVec,
    f: &TargetFn,
    cfg: &ProtocolConfig,
) -> Result<EstimateReport> {
    check_shapes(p, q, f)?;
    let cols = f.cols();
    let mut mixture = vec![0.0; cols];
    let mut shift = 0.0;
    for (x, px) in p.support() {
        let slice: Vec<f64> = (0..cols).map(|y| f.entry(x, y)).collect();
        let d = convex_to_measure(&slice)?;
        shift += px * d.shift;
        for (z, w) in d.masses().iter().enumerate() {
            mixture[z] += px * w;
        }
    }
    let d = ProbVec::from_weights(&mixture)?;
    let quant = Quantizer::new(-2.0, 2.0, cfg.epsilon / 4.0)?;
    let shift = quant.quantize(shift).decoded;
    let mut ledger = CostLedger::new();
    ledger.send_reals(Party::Alice, 1, &quant, "convex/shift");
    let inner = abs_protocol(&d, q, &cfg.child(0.75 * cfg.epsilon, 1))?;
    ledger.extend(&inner.ledger, "");
    Ok(EstimateReport::new(shift + inner.estimate, ledger, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: usize, g: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=m).map(|i| g(i as f64 / m as f64)).collect()
    }

    #[test]
    fn absolute_value_is_a_point_mass() {
        let m = 100;
        let d = convex_to_measure(&grid(m, |x| (x - 0.3).abs())).unwrap();
        let masses = d.masses();
        assert!((masses[30] - 1.0).abs() < 1e-9);
        assert!(d.shift.abs() < 1e-9);
    }

    #[test]
    fn identity_is_mass_at_zero() {
        let d = convex_to_measure(&grid(50, |x| x)).unwrap();
        assert!((d.masses()[0] - 1.0).abs() < 1e-9);
        assert!(d.shift.abs() < 1e-12);
    }

    #[test]
    fn parabola_is_uniform() {
        let m = 200;
        let step = 1.0 / m as f64;
        let vals = grid(m, |x| (x - 0.5).powi(2));
        let d = convex_to_measure(&vals).unwrap();
        for (i, c) in d.cdf.iter().enumerate().take(m) {
            assert!((c - i as f64 / m as f64).abs() <= 2.0 * step);
        }
        assert!((d.shift + 0.25).abs() <= 2.0 * step);
        for (i, v) in vals.iter().enumerate() {
            let x = i as f64 * step;
            assert!((d.evaluate(x) - v).abs() <= 1e-12);
            let uniform = x * x - x + 0.5;
            assert!((d.evaluate(x) - d.shift - uniform).abs() <= 2.0 * step);
        }
    }

    #[test]
    fn names_offending_cell() {
        let mut vals = grid(10, |x| x * x / 2.0);
        vals[6] += 0.05;
        match convex_to_measure(&vals) {
            Err(Error::NotConvexLipschitz { cell, .. }) => assert!(cell == 6 || cell == 5),
            other => panic!("expected a convexity error, got {other:?}"),
        }
        assert!(matches!(
            convex_to_measure(&grid(10, |x| 2.0 * x)),
            Err(Error::NotConvexLipschitz { cell: 0, .. })
        ));
    }
}
