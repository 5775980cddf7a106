use estcomm::diag::{
    brute_force_discrepancy, brute_force_discrepancy_with, lambda_bound_check, path_distance_inverse,
    path_distance_inverse_check, rectangle_bias, svd_summary, DISCREPANCY_ROW_CAP,
};
use estcomm::par::Execution;
use estcomm::{build_family, Error, FamilySpec, ProbVec, TargetFn};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Top singular value of `a` by power iteration on `a^T a`.
fn power_iteration(a: &DMatrix<f64>) -> f64 {
    let ata = a.transpose() * a;
    let mut v = DVector::from_fn(a.ncols(), |i, _| 1.0 + (i as f64 * 0.37).sin());
    let mut value = 0.0;
    for _ in 0..5000 {
        let w = &ata * &v;
        let norm = w.norm();
        v = w / norm;
        if (norm - value).abs() <= 1e-15 * norm {
            break;
        }
        value = norm;
    }
    value.sqrt()
}

#[test]
fn top_singular_value_matches_power_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let (r, c) = (rng.random_range(2..40), rng.random_range(2..40));
        let m = DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
        let s = svd_summary(&TargetFn::from_dense(m.clone()).unwrap()).unwrap();
        assert!((s.spectral_norm - power_iteration(&m)).abs() < 1e-6);
        assert!((s.frobenius - m.norm()).abs() < 1e-12);
        let sq: f64 = s.singular_values.iter().map(|v| v * v).sum();
        assert!((sq - m.norm_squared()).abs() < 1e-9);
        assert!(s.lambda.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn hadamard_floor_is_tight() {
    for k in [4, 16, 64] {
        let s = svd_summary(&build_family(FamilySpec::Hadamard { k }).unwrap()).unwrap();
        let margins = lambda_bound_check(&s, k).unwrap();
        assert!(margins[k - 1].abs() < 1e-9);
        assert!((s.lambda_at(k) - (k as f64).sqrt()).abs() < 1e-9);
    }
}

#[test]
fn floor_violation_is_reported() {
    let s = svd_summary(&build_family(FamilySpec::Eq { size: 4 }).unwrap()).unwrap();
    // A 1x1 bound with k = 1 claims lambda_t >= t^{3/2}; identity gives t.
    match lambda_bound_check(&s, 1) {
        Err(Error::LambdaFloorViolated { t, .. }) => assert_eq!(t, 2),
        other => panic!("expected a floor violation, got {other:?}"),
    }
}

#[test]
fn closed_form_inverse() {
    for k in [2, 3, 10, 64] {
        let e = DMatrix::from_fn(k, k, |i, j| i.abs_diff(j) as f64);
        let inv = e.clone().try_inverse().unwrap();
        assert!((inv - path_distance_inverse(k)).amax() < 1e-9);
    }
    let c = path_distance_inverse_check(64).unwrap();
    assert!(c.residual <= 1e-9);
    assert!(c.lambda_k <= 1.5f64.sqrt() * 4096.0);
}

#[test]
fn discrepancy_witness_recomputes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let (r, c) = (rng.random_range(1..=12), rng.random_range(1..=20));
        let f = TargetFn::from_dense(DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))).unwrap();
        let tx = ProbVec::from_weights(&(0..r).map(|_| rng.random::<f64>()).collect::<Vec<_>>()).unwrap();
        let ty = ProbVec::from_weights(&(0..c).map(|_| rng.random::<f64>()).collect::<Vec<_>>()).unwrap();
        let rep = brute_force_discrepancy(&f, &tx, &ty).unwrap();
        let again = rectangle_bias(&f, &tx, &ty, &rep.witness_rows, &rep.witness_cols);
        assert!((again - rep.value).abs() <= 1e-12);
        let seq = brute_force_discrepancy_with(&f, &tx, &ty, Execution::Sequential).unwrap();
        assert_eq!(seq, rep);
    }
}

#[test]
fn balanced_rows_with_one_positive_row() {
    // Row 0 is all +1; the others alternate in sign.
    let f = TargetFn::from_dense(DMatrix::from_fn(6, 6, |x, y| {
        if x == 0 || (x + y) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }))
    .unwrap();
    let tx = ProbVec::from_weights(&[3.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
    let u = ProbVec::uniform(6).unwrap();
    let rep = brute_force_discrepancy(&f, &tx, &u).unwrap();
    assert!(rep.value >= tx.get(0) - 1e-12);
}

#[test]
fn enumeration_cap() {
    let n = DISCREPANCY_ROW_CAP + 1;
    let f = build_family(FamilySpec::Eq { size: n }).unwrap();
    let u = ProbVec::uniform(n).unwrap();
    assert!(matches!(brute_force_discrepancy(&f, &u, &u), Err(Error::SizeCapExceeded { .. })));
}

#[test]
fn size_cap_on_summary() {
    let f = build_family(FamilySpec::Eq { size: 4096 }).unwrap();
    assert!(matches!(svd_summary(&f), Err(Error::SizeCapExceeded { .. })));
}
