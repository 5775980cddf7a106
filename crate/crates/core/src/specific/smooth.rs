//! Functions with `k` bounded `y`-derivatives on `[0, 1]^2`.
//!
//! `[0, 1]` is cut into blocks of width `alpha = eps^(1/(k+1))`, and on block
//! `j` each slice `f(x, .)` is replaced by its order-`k` Taylor polynomial at
//! `j alpha`. Alice sends the averaged Taylor coefficients
//! `E_{x~p} d^i/dy^i f(x, j alpha)`, from which Bob evaluates the polynomial
//! part exactly. The remainder is at most `B_k alpha^k / k!` and is
//! estimated with the debiasing protocol after rescaling to `[-1, 1]`.

use crate::error::{Error, Result};
use crate::generic::debiasing_protocol;
use crate::model::oracle::check_shapes;
use crate::model::{
    CostLedger, EstimateReport, Family, Party, ProbVec, ProtocolConfig, Quantizer, SmoothKind,
    SmoothSurface, TargetFn,
};

fn factorial(i: usize) -> f64 {
    (1..=i).map(|v| v as f64).product()
}

struct Taylor {
    kind: SmoothKind,
    alpha: f64,
    blocks: usize,
    order: usize,
}

impl Taylor {
    fn block(&self, y: f64) -> usize {
        ((y / self.alpha).floor() as usize).min(self.blocks - 1)
    }

    fn approx(&self, x: f64, y: f64) -> f64 {
        let c = self.block(y) as f64 * self.alpha;
        (0..self.order)
            .map(|i| self.kind.dy(i, x, c) * (y - c).powi(i as i32) / factorial(i))
            .sum()
    }
}

/// Smooth-function protocol with Taylor order `k >= 1`.
pub fn smooth_protocol(
    p: &ProbVec,
    q: &ProbVec,
    f: &TargetFn,
    k: usize,
    cfg: &ProtocolConfig,
) -> Result<EstimateReport> {
    check_shapes(p, q, f)?;
    let kind = f
        .smooth_surface()
        .cloned()
        .ok_or_else(|| Error::Precondition("no derivative oracle: not a smooth grid function".into()))?;
    if k == 0 {
        return Err(crate::error::invalid("k", "derivative order must be positive"));
    }
    let m = f.grid().expect("smooth grid families carry their grid");
    let scale = m as f64;
    let eps = cfg.epsilon;
    let alpha = eps.powf(1.0 / (k as f64 + 1.0));
    let blocks = (1.0 / alpha).ceil() as usize;
    let taylor = Taylor {
        kind: kind.clone(),
        alpha,
        blocks,
        order: k,
    };

    // Stage 1: averaged Taylor coefficients.
    let mut ledger = CostLedger::new();
    let mut moments = vec![vec![0.0; k]; blocks];
    for (i, bound) in (0..k).map(|i| (i, kind.derivative_bound(i))) {
        if bound <= 0.0 {
            continue;
        }
        let quant = Quantizer::new(-bound, bound, eps * alpha / 3.0)?;
        for (j, row) in moments.iter_mut().enumerate() {
            let c = j as f64 * alpha;
            let avg: f64 = p.support().map(|(x, w)| w * kind.dy(i, x as f64 / scale, c)).sum();
            row[i] = quant.quantize(avg).decoded;
        }
        ledger.send_reals(Party::Alice, blocks, &quant, "smooth/moments");
    }
    let polynomial: f64 = q
        .support()
        .map(|(y, w)| {
            let yv = y as f64 / scale;
            let j = taylor.block(yv);
            let c = j as f64 * alpha;
            let v: f64 = (0..k).map(|i| moments[j][i] * (yv - c).powi(i as i32) / factorial(i)).sum();
            w * v
        })
        .sum();

    // Stage 2: the rescaled remainder on the native grid.
    let residual_bound = kind.derivative_bound(k) * alpha.powi(k as i32) / factorial(k);
    let mut estimate = polynomial;
    if residual_bound > 0.75 * eps {
        let s = residual_bound;
        let kind2 = kind.clone();
        let taylor = Taylor { kind: kind2, alpha, blocks, order: k };
        let resid = TargetFn::from_fn(f.rows(), f.cols(), Family::DenseCustom, move |x, y| {
            let (xv, yv) = (x as f64 / scale, y as f64 / scale);
            ((taylor.kind.value(xv, yv) - taylor.approx(xv, yv)) / s).clamp(-1.0, 1.0)
        })?;
        let inner = debiasing_protocol(p, q, &resid, &cfg.child(0.75 * eps / s, 1))?;
        estimate += s * inner.estimate;
        ledger.extend(&inner.ledger, "residual");
    }
    Ok(EstimateReport::new(estimate, ledger, cfg.seed)
        .with_budget("alpha", alpha)
        .with_budget("residual", residual_bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_family, exact_expectation, FamilySpec, Poly};

    #[test]
    fn separable_polynomial() {
        let kind = SmoothKind::Separable {
            u: Poly(vec![0.2, 0.3]),
            v: Poly(vec![0.1, -0.2, 0.4]),
        };
        let f = build_family(FamilySpec::SmoothGrid { m: 100, kind }).unwrap();
        let p = ProbVec::from_weights(&(0..=100).map(|i| (i % 7) as f64 + 1.0).collect::<Vec<_>>()).unwrap();
        let q = ProbVec::uniform(101).unwrap();
        let cfg = ProtocolConfig::new(0.01, 0.1, 0).unwrap();
        let r = smooth_protocol(&p, &q, &f, 3, &cfg).unwrap();
        assert!((r.estimate - exact_expectation(&p, &q, &f).unwrap()).abs() <= 0.01);
        assert_eq!(r.budget_term("residual"), Some(0.0));
    }

    #[test]
    fn requires_derivatives() {
        let f = build_family(FamilySpec::AbsGrid { m: 10 }).unwrap();
        let u = ProbVec::uniform(11).unwrap();
        let cfg = ProtocolConfig::new(0.1, 0.1, 0).unwrap();
        assert!(matches!(smooth_protocol(&u, &u, &f, 2, &cfg), Err(Error::Precondition(_))));
    }
}
