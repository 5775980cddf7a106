//! Exact expectations `E_{x~p, y~q}[f(x, y)]`.

use super::dist::ProbVec;
use super::func::{Family, TargetFn};
use crate::error::{Error, Result};

pub(crate) fn check_shapes(p: &ProbVec, q: &ProbVec, f: &TargetFn) -> Result<()> {
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
    Ok(())
}

/// `sum_x sum_y p(x) q(y) f(x, y)` over the supports.
pub fn exact_expectation(p: &ProbVec, q: &ProbVec, f: &TargetFn) -> Result<f64> {
    check_shapes(p, q, f)?;
    let value = match f.family() {
        Family::Eq => p.inner(q),
        Family::Gt => {
            // Pr[x >= y] = sum_x p(x) Q(x), Q the CDF of q.
            let mut cdf = 0.0;
            let mut total = 0.0;
            let mut qs = q.support().peekable();
            for (x, px) in p.support() {
                while let Some(&(y, qy)) = qs.peek() {
                    if y > x {
                        break;
                    }
                    cdf += qy;
                    qs.next();
                }
                total += px * cdf;
            }
            total
        }
        _ => {
            let qs: Vec<(usize, f64)> = q.support().collect();
            p.support()
                .map(|(x, px)| px * qs.iter().map(|&(y, qy)| qy * f.entry(x, y)).sum::<f64>())
                .sum()
        }
    };
    Ok(value)
}

/// `E_{b~q}[f(x, b)]` for a fixed row `x`.
pub fn row_mean(q: &ProbVec, f: &TargetFn, x: usize) -> f64 {
    q.support().map(|(y, qy)| qy * f.entry(x, y)).sum()
}

/// `E_{a~p}[f(a, y)]` for a fixed column `y`.
pub fn col_mean(p: &ProbVec, f: &TargetFn, y: usize) -> f64 {
    p.support().map(|(x, px)| px * f.entry(x, y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::func::{build_family, FamilySpec};
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dist(n: usize, rng: &mut ChaCha8Rng) -> ProbVec {
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        ProbVec::from_weights(&w).unwrap()
    }

    #[test]
    fn point_masses_on_eq() {
        let f = build_family(FamilySpec::eq_bits(3)).unwrap();
        let p = ProbVec::point_mass(8, 3).unwrap();
        assert_eq!(exact_expectation(&p, &p, &f).unwrap(), 1.0);
    }

    #[test]
    fn uniform_collision() {
        let f = build_family(FamilySpec::Eq { size: 10 }).unwrap();
        let u = ProbVec::uniform(10).unwrap();
        assert!((exact_expectation(&u, &u, &f).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 17, 40] {
            let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
            let f = TargetFn::from_dense(m.clone()).unwrap();
            let p = random_dist(n, &mut rng);
            let q = random_dist(n, &mut rng);
            let (pd, qd) = (p.to_dense(), q.to_dense());
            let mut want = 0.0;
            for x in 0..n {
                for y in 0..n {
                    want += pd[x] * qd[y] * m[(x, y)];
                }
            }
            assert!((exact_expectation(&p, &q, &f).unwrap() - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn gt_fast_path_matches_generic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = build_family(FamilySpec::Gt { size: 50 }).unwrap();
        let g = TargetFn::from_dense(f.dense().unwrap().clone()).unwrap();
        for _ in 0..20 {
            let p = random_dist(50, &mut rng);
            let q = random_dist(50, &mut rng);
            let a = exact_expectation(&p, &q, &f).unwrap();
            let b = exact_expectation(&p, &q, &g).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let f = build_family(FamilySpec::Eq { size: 4 }).unwrap();
        let p = ProbVec::uniform(5).unwrap();
        let q = ProbVec::uniform(4).unwrap();
        assert!(matches!(
            exact_expectation(&p, &q, &f),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn bilinear_in_p(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 12;
            let f = TargetFn::from_dense(DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0))).unwrap();
            let p1 = random_dist(n, &mut rng);
            let p2 = random_dist(n, &mut rng);
            let q = random_dist(n, &mut rng);
            let mixed = p1.mix(&p2, alpha).unwrap();
            let lhs = exact_expectation(&mixed, &q, &f).unwrap();
            let rhs = alpha * exact_expectation(&p1, &q, &f).unwrap()
                + (1.0 - alpha) * exact_expectation(&p2, &q, &f).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn self_collision_floor(seed in any::<u64>(), n in 1usize..64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_dist(n, &mut rng);
            let f = build_family(FamilySpec::Eq { size: n }).unwrap();
            let v = exact_expectation(&p, &p, &f).unwrap();
            let sq: f64 = p.support().map(|(_, m)| m * m).sum();
            prop_assert!((v - sq).abs() <= 1e-12);
            prop_assert!(v >= 1.0 / n as f64 - 1e-12);
        }
    }
}
