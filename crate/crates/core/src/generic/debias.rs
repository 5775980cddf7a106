//! The debiased pair estimator.
//!
//! For fixed `p, q` define
//! `g(x, y) = E_{a~p} f(a, y) + E_{b~q} f(x, b) - f(x, y)`.
//! Its mean under `p x q` is the target, and it stays unbiased when either
//! coordinate is held fixed, so all `k^2` cross pairs of `k` samples per side
//! can be averaged with variance `O(1 / k^2)`.

use rand::Rng;

use super::BASE_FAILURE;
use crate::error::{invalid, Result};
use crate::model::oracle::{check_shapes, col_mean, row_mean};
use crate::model::{
    amplification_runs, derive_seed, index_bits, median_of_runs, rng_from_seed, AccessMode,
    CostLedger, EstimateReport, Party, ProbVec, ProtocolConfig, Quantizer, Sampler, TargetFn,
};

/// Sample counts and precisions of one debiasing run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DebiasPlan {
    /// Samples drawn by each party.
    pub k_outer: usize,
    /// Precision of the transmitted correction term.
    pub g_precision: f64,
    /// Samples per conditional mean when only sample access is available.
    pub inner_sample_count: usize,
}

impl DebiasPlan {
    pub fn for_config(cfg: &ProtocolConfig) -> Self {
        let eps = cfg.epsilon;
        let k_outer = ((cfg.constant("debias.k", 40.0) / eps).ceil() as usize).max(1);
        // Each averaged conditional mean gets standard deviation <= eps / 30.
        let inner = (cfg.constant("debias.inner", 900.0) / (eps * eps * k_outer as f64)).ceil();
        Self {
            k_outer,
            g_precision: eps / 10.0,
            inner_sample_count: (inner as usize).max(1),
        }
    }

    /// Same plan with an explicit sample count per party.
    pub fn with_k(mut self, k: usize) -> Self {
        self.k_outer = k.max(1);
        self
    }
}

/// `E_{a~p} f(a, y) + E_{b~q} f(x, b) - f(x, y)`.
pub fn g_value(p: &ProbVec, q: &ProbVec, f: &TargetFn, x: usize, y: usize) -> f64 {
    col_mean(p, f, y) + row_mean(q, f, x) - f.entry(x, y)
}

fn sample_col_mean<R: Rng>(sp: &Sampler, f: &TargetFn, y: usize, s: usize, rng: &mut R) -> f64 {
    (0..s).map(|_| f.entry(sp.sample(rng), y)).sum::<f64>() / s as f64
}

fn sample_row_mean<R: Rng>(sq: &Sampler, f: &TargetFn, x: usize, s: usize, rng: &mut R) -> f64 {
    (0..s).map(|_| f.entry(x, sq.sample(rng))).sum::<f64>() / s as f64
}

/// Two-message evaluation of `g(x, y)` to within `budget`.
///
/// Alice sends `x`. Bob replies with `y` and `E_{b~q} f(x, b) - f(x, y)`
/// quantized on `[-2, 2]`; Alice adds her own `E_{a~p} f(a, y)`. Under
/// sample access each conditional mean is an average of `36 / budget^2`
/// draws.
pub fn estimate_g_two_round<R: Rng>(
    p: &ProbVec,
    q: &ProbVec,
    f: &TargetFn,
    x: usize,
    y: usize,
    budget: f64,
    access: AccessMode,
    rng: &mut R,
) -> Result<(f64, CostLedger)> {
    if !(budget > 0.0) {
        return Err(invalid("budget", format!("must be positive, got {budget}")));
    }
    let quant = Quantizer::new(-2.0, 2.0, budget)?;
    let (alice_part, bob_part) = match access {
        AccessMode::FullDistribution => (col_mean(p, f, y), row_mean(q, f, x)),
        AccessMode::SampleOnly => {
            let s = (36.0 / (budget * budget)).ceil() as usize;
            let a = sample_col_mean(&p.sampler(), f, y, s, rng);
            let b = sample_row_mean(&q.sampler(), f, x, s, rng);
            (a, b)
        }
    };
    let reply = quant.quantize(bob_part - f.entry(x, y)).decoded;
    let mut ledger = CostLedger::new();
    ledger.send(Party::Alice, index_bits(f.rows()), "g/x");
    ledger.send(Party::Bob, index_bits(f.cols()), "g/y");
    ledger.send_reals(Party::Bob, 1, &quant, "g/correction");
    Ok((alice_part + reply, ledger))
}

/// `z = (1/k^2) sum_{i,j} g(x_i, y_j)` computed from exact conditional means.
pub fn debias_statistic(p: &ProbVec, q: &ProbVec, f: &TargetFn, xs: &[usize], ys: &[usize]) -> f64 {
    let a: f64 = ys.iter().map(|&y| col_mean(p, f, y)).sum::<f64>() / ys.len() as f64;
    let b: f64 = xs.iter().map(|&x| row_mean(q, f, x)).sum::<f64>() / xs.len() as f64;
    a + b - cross_mean(f, xs, ys)
}

fn cross_mean(f: &TargetFn, xs: &[usize], ys: &[usize]) -> f64 {
    let total: f64 = xs
        .iter()
        .map(|&x| ys.iter().map(|&y| f.entry(x, y)).sum::<f64>())
        .sum();
    total / (xs.len() * ys.len()) as f64
}

/// Debiasing protocol with the default plan.
pub fn debiasing_protocol(
    p: &ProbVec,
    q: &ProbVec,
    f: &TargetFn,
    cfg: &ProtocolConfig,
) -> Result<EstimateReport> {
    debiasing_with_plan(p, q, f, cfg, DebiasPlan::for_config(cfg))
}

/// Both parties draw `k` samples. Alice sends her samples; Bob sends his
/// samples together with his share `B - C` of the averaged statistic,
/// where `B` averages `E_q f(x_i, .)` and `C` averages `f(x_i, y_j)` over
/// all cross pairs. Alice outputs `A + (B - C)` with `A` the average of
/// `E_p f(., y_j)`.
pub fn debiasing_with_plan(
    p: &ProbVec,
    q: &ProbVec,
    f: &TargetFn,
    cfg: &ProtocolConfig,
    plan: DebiasPlan,
) -> Result<EstimateReport> {
    check_shapes(p, q, f)?;
    let k = plan.k_outer;
    let runs = amplification_runs(cfg.delta, BASE_FAILURE);
    let (sp, sq) = (p.sampler(), q.sampler());
    let quant = Quantizer::new(-2.0, 2.0, plan.g_precision)?;

    let (estimate, ledger) = median_of_runs(runs, |run| {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, run as u64));
        let xs: Vec<usize> = (0..k).map(|_| sp.sample(&mut rng)).collect();
        let ys: Vec<usize> = (0..k).map(|_| sq.sample(&mut rng)).collect();
        let (a, b) = match cfg.access {
            AccessMode::FullDistribution => (
                ys.iter().map(|&y| col_mean(p, f, y)).sum::<f64>() / k as f64,
                xs.iter().map(|&x| row_mean(q, f, x)).sum::<f64>() / k as f64,
            ),
            AccessMode::SampleOnly => {
                let s = plan.inner_sample_count;
                (
                    ys.iter()
                        .map(|&y| sample_col_mean(&sp, f, y, s, &mut rng))
                        .sum::<f64>()
                        / k as f64,
                    xs.iter()
                        .map(|&x| sample_row_mean(&sq, f, x, s, &mut rng))
                        .sum::<f64>()
                        / k as f64,
                )
            }
        };
        let c = cross_mean(f, &xs, &ys);
        let reply = quant.quantize(b - c).decoded;
        let mut ledger = CostLedger::new();
        ledger.send(Party::Alice, k as u64 * index_bits(f.rows()), "debias/samples");
        ledger.send(Party::Bob, k as u64 * index_bits(f.cols()), "debias/samples");
        ledger.send_reals(Party::Bob, 1, &quant, "debias/correction");
        Ok((a + reply, ledger))
    })?;
    Ok(EstimateReport::new(estimate, ledger, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_family, exact_expectation, FamilySpec};
    use nalgebra::DMatrix;

    #[test]
    fn g_collapses_for_row_function() {
        // f(x, y) = x on {0, 1}^2.
        let f = TargetFn::from_dense(DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 1.0])).unwrap();
        let u = ProbVec::uniform(2).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((g_value(&u, &u, &f, x, y) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn g_of_constant_and_eq() {
        let c = TargetFn::from_dense(DMatrix::from_element(3, 3, 0.3)).unwrap();
        let u = ProbVec::uniform(3).unwrap();
        assert!((g_value(&u, &u, &c, 1, 2) - 0.3).abs() < 1e-15);
        let k = 8;
        let eq = build_family(FamilySpec::Eq { size: k }).unwrap();
        let u = ProbVec::uniform(k).unwrap();
        for (x, y) in [(0, 0), (2, 5)] {
            let want = 2.0 / k as f64 - if x == y { 1.0 } else { 0.0 };
            assert!((g_value(&u, &u, &eq, x, y) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn two_round_g_is_exact_up_to_quantization() {
        let f = build_family(FamilySpec::RandomBoolean { n: 4, seed: 3 }).unwrap();
        let p = ProbVec::from_weights(&(1..=16).map(f64::from).collect::<Vec<_>>()).unwrap();
        let q = ProbVec::uniform(16).unwrap();
        let mut rng = rng_from_seed(0);
        for budget in [1.0, 0.1, 0.01] {
            for (x, y) in [(0, 0), (3, 9), (15, 2)] {
                let (v, l) = estimate_g_two_round(
                    &p, &q, &f, x, y, budget, AccessMode::FullDistribution, &mut rng,
                )
                .unwrap();
                assert!((v - g_value(&p, &q, &f, x, y)).abs() <= budget);
                assert_eq!(l.rounds(), 2);
                assert!(l.is_consistent());
            }
        }
    }

    #[test]
    fn row_function_has_zero_variance() {
        let f = TargetFn::from_dense(DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 1.0])).unwrap();
        let u = ProbVec::uniform(2).unwrap();
        for seed in 0..20 {
            let cfg = ProtocolConfig::new(0.1, 0.1, seed).unwrap();
            let r = debiasing_protocol(&u, &u, &f, &cfg).unwrap();
            assert!((r.estimate - 0.5).abs() <= 0.1 / 40.0 + 1e-12);
        }
    }

    #[test]
    fn point_masses() {
        let f = build_family(FamilySpec::RandomBoolean { n: 3, seed: 9 }).unwrap();
        let p = ProbVec::point_mass(8, 2).unwrap();
        let q = ProbVec::point_mass(8, 6).unwrap();
        let cfg = ProtocolConfig::new(0.05, 0.1, 1).unwrap();
        let r = debiasing_protocol(&p, &q, &f, &cfg).unwrap();
        assert!((r.estimate - exact_expectation(&p, &q, &f).unwrap()).abs() <= 0.05);
    }
}
