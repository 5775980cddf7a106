//! Bounded payoff functions `f : [rows] x [cols] -> [-1, 1]`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use rand::Rng;

use super::rng::rng_from_seed;
use crate::error::{invalid, Error, Result};
use crate::linalg::Svd;

/// Largest side of a matrix this crate will materialize densely by default.
pub const DENSE_CAP: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Eq,
    Gt,
    Ip,
    AbsGrid,
    SmoothGrid,
    Toeplitz,
    Hadamard,
    Distance,
    DoubleIndex,
    RandomBoolean,
    DenseCustom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Eq => "eq",
            Family::Gt => "gt",
            Family::Ip => "ip",
            Family::AbsGrid => "abs",
            Family::SmoothGrid => "smooth",
            Family::Toeplitz => "toeplitz",
            Family::Hadamard => "hadamard",
            Family::Distance => "distance",
            Family::DoubleIndex => "double_index",
            Family::RandomBoolean => "random_boolean",
            Family::DenseCustom => "dense_custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A smooth function on `[0, 1]^2` with `y`-derivatives available.
pub trait SmoothSurface: Send + Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    /// `d^order/dy^order f(x, y)`.
    fn dy(&self, order: usize, x: f64, y: f64) -> f64;
    /// Bound on `|d^order/dy^order f|` over the unit square.
    fn derivative_bound(&self, order: usize) -> f64;
}

/// Real polynomial, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn derivative(&self, order: usize) -> Poly {
        let mut c = self.0.clone();
        for _ in 0..order {
            if c.len() <= 1 {
                return Poly(vec![0.0]);
            }
            c = c.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect();
        }
        Poly(c)
    }

    /// Crude bound on `[0, 1]`: sum of absolute coefficients.
    pub fn bound(&self) -> f64 {
        self.0.iter().map(|c| c.abs()).sum()
    }
}

/// Built-in smooth surfaces.
#[derive(Clone)]
pub enum SmoothKind {
    /// `u(x) * v(y)`.
    Separable { u: Poly, v: Poly },
    /// `(x + y)^2 / 8`.
    QuadraticSum,
    /// `sin(x + y) / 4`.
    SinSum,
    Custom(Arc<dyn SmoothSurface>),
}

impl fmt::Debug for SmoothKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothKind::Separable { u, v } => write!(f, "Separable({u:?}, {v:?})"),
            SmoothKind::QuadraticSum => f.write_str("QuadraticSum"),
            SmoothKind::SinSum => f.write_str("SinSum"),
            SmoothKind::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl SmoothSurface for SmoothKind {
    fn value(&self, x: f64, y: f64) -> f64 {
        match self {
            SmoothKind::Separable { u, v } => u.eval(x) * v.eval(y),
            SmoothKind::QuadraticSum => (x + y).powi(2) / 8.0,
            SmoothKind::SinSum => (x + y).sin() / 4.0,
            SmoothKind::Custom(s) => s.value(x, y),
        }
    }

    fn dy(&self, order: usize, x: f64, y: f64) -> f64 {
        match self {
            SmoothKind::Separable { u, v } => u.eval(x) * v.derivative(order).eval(y),
            SmoothKind::QuadraticSum => match order {
                0 => (x + y).powi(2) / 8.0,
                1 => (x + y) / 4.0,
                2 => 0.25,
                _ => 0.0,
            },
            SmoothKind::SinSum => {
                let s = x + y;
                let v = match order % 4 {
                    0 => s.sin(),
                    1 => s.cos(),
                    2 => -s.sin(),
                    _ => -s.cos(),
                };
                v / 4.0
            }
            SmoothKind::Custom(s) => s.dy(order, x, y),
        }
    }

    fn derivative_bound(&self, order: usize) -> f64 {
        match self {
            SmoothKind::Separable { u, v } => u.bound() * v.derivative(order).bound(),
            SmoothKind::QuadraticSum => match order {
                0 | 1 => 0.5,
                2 => 0.25,
                _ => 0.0,
            },
            SmoothKind::SinSum => 0.25,
            SmoothKind::Custom(s) => s.derivative_bound(order),
        }
    }
}

/// Parameters of a constructible function family.
#[derive(Clone, Debug)]
pub enum FamilySpec {
    /// `1[x = y]` on a domain of `size` elements (the identity matrix).
    Eq { size: usize },
    /// `1[x >= y]` on a domain of `size` ordered elements.
    Gt { size: usize },
    /// `(-1)^<x, y>` on `{0,1}^n`.
    Ip { n: u32 },
    /// `|x - y|` on the grid `{0, 1/m, ..., 1}`.
    AbsGrid { m: usize },
    /// A smooth surface sampled on the grid `{0, 1/m, ..., 1}`.
    SmoothGrid { m: usize, kind: SmoothKind },
    /// `f(x, y) = diagonals[x - y + size - 1]`, `2 * size - 1` diagonals.
    Toeplitz { diagonals: Vec<f64> },
    /// Sylvester Hadamard matrix of order `k` (a power of two).
    Hadamard { k: usize },
    /// `|i - j| / k` on `[k] x [k]`.
    Distance { k: usize },
    /// Inputs `(i, x)` and `(j, y)` with `i, j < 2^k`, `x, y in {+-1}^(2^k)`;
    /// value `x_j * y_i`.
    DoubleIndex { k: u32 },
    /// Independent fair 0/1 entries on `{0,1}^n x {0,1}^n`.
    RandomBoolean { n: u32, seed: u64 },
}

impl FamilySpec {
    pub fn eq_bits(n: u32) -> Self {
        FamilySpec::Eq { size: 1usize << n }
    }

    pub fn gt_bits(n: u32) -> Self {
        FamilySpec::Gt { size: 1usize << n }
    }

    pub fn family(&self) -> Family {
        match self {
            FamilySpec::Eq { .. } => Family::Eq,
            FamilySpec::Gt { .. } => Family::Gt,
            FamilySpec::Ip { .. } => Family::Ip,
            FamilySpec::AbsGrid { .. } => Family::AbsGrid,
            FamilySpec::SmoothGrid { .. } => Family::SmoothGrid,
            FamilySpec::Toeplitz { .. } => Family::Toeplitz,
            FamilySpec::Hadamard { .. } => Family::Hadamard,
            FamilySpec::Distance { .. } => Family::Distance,
            FamilySpec::DoubleIndex { .. } => Family::DoubleIndex,
            FamilySpec::RandomBoolean { .. } => Family::RandomBoolean,
        }
    }
}

type Oracle = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;

/// A bounded function given by an entry oracle, with lazily materialized
/// dense form and SVD.
#[derive(Clone)]
pub struct TargetFn {
    rows: usize,
    cols: usize,
    family: Family,
    spec: Option<FamilySpec>,
    oracle: Oracle,
    dense: Arc<OnceLock<DMatrix<f64>>>,
    svd: Arc<OnceLock<std::result::Result<Arc<Svd>, String>>>,
}

impl fmt::Debug for TargetFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFn")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("family", &self.family)
            .finish()
    }
}

impl TargetFn {
    /// Wraps an entry oracle. Entries are not checked until materialized.
    pub fn from_fn<F>(rows: usize, cols: usize, family: Family, oracle: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Send + Sync + 'static,
    {
        if rows == 0 || cols == 0 {
            return Err(invalid("shape", format!("{rows}x{cols} is empty")));
        }
        Ok(Self {
            rows,
            cols,
            family,
            spec: None,
            oracle: Arc::new(oracle),
            dense: Arc::new(OnceLock::new()),
            svd: Arc::new(OnceLock::new()),
        })
    }

    /// A custom function from a dense matrix; entries must lie in `[-1, 1]`.
    pub fn from_dense(matrix: DMatrix<f64>) -> Result<Self> {
        check_entries(&matrix)?;
        let m = Arc::new(matrix.clone());
        let f = Self::from_fn(matrix.nrows(), matrix.ncols(), Family::DenseCustom, move |x, y| {
            m[(x, y)]
        })?;
        let _ = f.dense.set(matrix);
        Ok(f)
    }

    /// Installs a known factorization, verified against the dense form.
    pub fn with_svd(self, svd: Svd) -> Result<Self> {
        let dense = self.dense()?;
        let residual = (svd.reconstruct(svd.rank()) - dense).norm();
        let tol = 1e-8 * self.rows.max(self.cols) as f64;
        if residual > tol {
            return Err(Error::SvdUnavailable(format!(
                "supplied factors reconstruct with Frobenius error {residual:.3e} > {tol:.3e}"
            )));
        }
        let _ = self.svd.set(Ok(Arc::new(svd)));
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn spec(&self) -> Option<&FamilySpec> {
        self.spec.as_ref()
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        match self.dense.get() {
            Some(m) => m[(x, y)],
            None => (self.oracle)(x, y),
        }
    }

    pub fn has_dense(&self) -> bool {
        self.dense.get().is_some()
    }

    /// Dense matrix, materialized on first use (subject to [`DENSE_CAP`]).
    pub fn dense(&self) -> Result<&DMatrix<f64>> {
        self.dense_capped(DENSE_CAP)
    }

    pub fn dense_capped(&self, cap: usize) -> Result<&DMatrix<f64>> {
        if let Some(m) = self.dense.get() {
            return Ok(m);
        }
        if self.rows > cap || self.cols > cap {
            return Err(Error::SizeCapExceeded {
                rows: self.rows,
                cols: self.cols,
                cap,
            });
        }
        let m = DMatrix::from_fn(self.rows, self.cols, |x, y| (self.oracle)(x, y));
        check_entries(&m)?;
        Ok(self.dense.get_or_init(|| m))
    }

    /// Cached SVD of the dense form.
    pub fn svd(&self) -> Result<Arc<Svd>> {
        let cached = self.svd.get_or_init(|| {
            self.dense()
                .map_err(|e| e.to_string())
                .and_then(|d| Svd::compute(d).map_err(|e| e.to_string()))
                .map(Arc::new)
        });
        cached.clone().map_err(Error::SvdUnavailable)
    }

    /// Largest number of nonzero entries in any row.
    pub fn row_sparsity(&self) -> Result<usize> {
        let d = self.dense()?;
        Ok((0..self.rows)
            .map(|x| d.row(x).iter().filter(|v| **v != 0.0).count())
            .max()
            .unwrap_or(0))
    }

    /// Grid size `m` for grid families (points `i / m`, `i = 0..=m`).
    pub fn grid(&self) -> Option<usize> {
        match &self.spec {
            Some(FamilySpec::AbsGrid { m }) | Some(FamilySpec::SmoothGrid { m, .. }) => Some(*m),
            _ => None,
        }
    }

    pub fn smooth_surface(&self) -> Option<&SmoothKind> {
        match &self.spec {
            Some(FamilySpec::SmoothGrid { kind, .. }) => Some(kind),
            _ => None,
        }
    }
}

fn check_entries(m: &DMatrix<f64>) -> Result<()> {
    if let Some((k, v)) = m
        .iter()
        .enumerate()
        .find(|(_, v)| !(-1.0..=1.0).contains(*v))
    {
        let (r, c) = (k % m.nrows(), k / m.nrows());
        return Err(invalid("entry", format!("f({r}, {c}) = {v} outside [-1, 1]")));
    }
    Ok(())
}

/// Bit `b` of `x` as a sign: 0 -> +1, 1 -> -1.
fn sign_bit(x: usize, b: usize) -> f64 {
    if (x >> b) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Constructs the function named by `spec`.
pub fn build_family(spec: FamilySpec) -> Result<TargetFn> {
    let mut f = match &spec {
        FamilySpec::Eq { size } => {
            positive("size", *size)?;
            TargetFn::from_fn(*size, *size, Family::Eq, |x, y| f64::from(u8::from(x == y)))?
        }
        FamilySpec::Gt { size } => {
            positive("size", *size)?;
            TargetFn::from_fn(*size, *size, Family::Gt, |x, y| f64::from(u8::from(x >= y)))?
        }
        FamilySpec::Ip { n } => {
            let size = bit_domain("n", *n, 24)?;
            TargetFn::from_fn(size, size, Family::Ip, |x, y| {
                if (x & y).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })?
        }
        FamilySpec::Hadamard { k } => {
            if !k.is_power_of_two() {
                return Err(invalid("k", format!("Hadamard order {k} is not a power of two")));
            }
            TargetFn::from_fn(*k, *k, Family::Hadamard, |x, y| {
                if (x & y).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })?
        }
        FamilySpec::AbsGrid { m } => {
            positive("m", *m)?;
            let scale = *m as f64;
            TargetFn::from_fn(m + 1, m + 1, Family::AbsGrid, move |x, y| {
                (x as f64 / scale - y as f64 / scale).abs()
            })?
        }
        FamilySpec::SmoothGrid { m, kind } => {
            positive("m", *m)?;
            let scale = *m as f64;
            let kind = kind.clone();
            let bound = kind.derivative_bound(0);
            if bound > 1.0 {
                return Err(invalid("kind", format!("surface bound {bound} exceeds 1")));
            }
            TargetFn::from_fn(m + 1, m + 1, Family::SmoothGrid, move |x, y| {
                kind.value(x as f64 / scale, y as f64 / scale)
            })?
        }
        FamilySpec::Toeplitz { diagonals } => {
            if diagonals.is_empty() || diagonals.len() % 2 == 0 {
                return Err(invalid(
                    "diagonals",
                    format!("need an odd count 2N-1, got {}", diagonals.len()),
                ));
            }
            if let Some(v) = diagonals.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
                return Err(invalid("diagonals", format!("value {v} outside [-1, 1]")));
            }
            let size = diagonals.len().div_ceil(2);
            let d = Arc::new(diagonals.clone());
            TargetFn::from_fn(size, size, Family::Toeplitz, move |x, y| d[x + size - 1 - y])?
        }
        FamilySpec::Distance { k } => {
            positive("k", *k)?;
            let scale = *k as f64;
            TargetFn::from_fn(*k, *k, Family::Distance, move |x, y| x.abs_diff(y) as f64 / scale)?
        }
        FamilySpec::DoubleIndex { k } => {
            if *k == 0 || *k > 3 {
                return Err(invalid("k", format!("double-index k must be in 1..=3, got {k}")));
            }
            let width = 1usize << k;
            let size = width << width;
            TargetFn::from_fn(size, size, Family::DoubleIndex, move |a, b| {
                let (i, x) = (a >> width, a & ((1 << width) - 1));
                let (j, y) = (b >> width, b & ((1 << width) - 1));
                sign_bit(x, j) * sign_bit(y, i)
            })?
        }
        FamilySpec::RandomBoolean { n, seed } => {
            let size = bit_domain("n", *n, 11)?;
            let mut rng = rng_from_seed(*seed);
            let m = DMatrix::from_fn(size, size, |_, _| f64::from(u8::from(rng.random::<bool>())));
            let mut f = TargetFn::from_dense(m)?;
            f.family = Family::RandomBoolean;
            f
        }
    };
    f.spec = Some(spec);
    Ok(f)
}

fn positive(name: &'static str, v: usize) -> Result<()> {
    if v == 0 {
        Err(invalid(name, "must be positive"))
    } else {
        Ok(())
    }
}

fn bit_domain(name: &'static str, n: u32, max: u32) -> Result<usize> {
    if n == 0 || n > max {
        return Err(invalid(name, format!("{n} not in 1..={max}")));
    }
    Ok(1usize << n)
}

/// Decodes a double-index input into `(i, x)`.
pub fn double_index_parts(k: u32, input: usize) -> (usize, usize) {
    let width = 1usize << k;
    (input >> width, input & ((1 << width) - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(f: &TargetFn) -> Vec<Vec<f64>> {
        (0..f.rows())
            .map(|x| (0..f.cols()).map(|y| f.entry(x, y)).collect())
            .collect()
    }

    #[test]
    fn eq_is_identity() {
        let f = build_family(FamilySpec::eq_bits(2)).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(f.entry(x, y), if x == y { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn ip_one_bit() {
        let f = build_family(FamilySpec::Ip { n: 1 }).unwrap();
        assert_eq!(matrix(&f), vec![vec![1.0, 1.0], vec![1.0, -1.0]]);
    }

    #[test]
    fn distance_formula() {
        let f = build_family(FamilySpec::Distance { k: 3 }).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.entry(i, j), (i as f64 - j as f64).abs() / 3.0);
            }
        }
    }

    #[test]
    fn gt_and_abs_grid() {
        let gt = build_family(FamilySpec::Gt { size: 5 }).unwrap();
        assert_eq!(gt.entry(3, 3), 1.0);
        assert_eq!(gt.entry(2, 3), 0.0);
        let abs = build_family(FamilySpec::AbsGrid { m: 4 }).unwrap();
        assert_eq!(abs.rows(), 5);
        assert_eq!(abs.entry(0, 4), 1.0);
        assert_eq!(abs.entry(3, 1), 0.5);
        assert_eq!(abs.grid(), Some(4));
    }

    #[test]
    fn double_index_reads_opposite_bits() {
        let f = build_family(FamilySpec::DoubleIndex { k: 1 }).unwrap();
        // k = 1: i, j in {0, 1}, x, y in {+-1}^2, domain 2 * 4 = 8.
        assert_eq!(f.rows(), 8);
        for a in 0..8 {
            for b in 0..8 {
                let (i, x) = double_index_parts(1, a);
                let (j, y) = double_index_parts(1, b);
                assert_eq!(f.entry(a, b), sign_bit(x, j) * sign_bit(y, i));
            }
        }
    }

    #[test]
    fn toeplitz_diagonals() {
        // size 3: diagonals indexed by x - y in -2..=2.
        let f = build_family(FamilySpec::Toeplitz {
            diagonals: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
        })
        .unwrap();
        assert_eq!(f.entry(0, 2), -1.0);
        assert_eq!(f.entry(2, 0), 1.0);
        assert_eq!(f.entry(1, 1), 0.0);
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(build_family(FamilySpec::Hadamard { k: 6 }).is_err());
        assert!(build_family(FamilySpec::Ip { n: 0 }).is_err());
        assert!(build_family(FamilySpec::Toeplitz { diagonals: vec![0.0, 1.0] }).is_err());
        assert!(build_family(FamilySpec::Toeplitz { diagonals: vec![2.0] }).is_err());
        assert!(TargetFn::from_dense(DMatrix::from_element(2, 2, 1.5)).is_err());
    }

    #[test]
    fn dense_cap_enforced() {
        let f = build_family(FamilySpec::eq_bits(12)).unwrap();
        assert!(matches!(f.dense_capped(1024), Err(Error::SizeCapExceeded { .. })));
    }

    #[test]
    fn cached_svd_reconstructs() {
        let f = build_family(FamilySpec::Hadamard { k: 8 }).unwrap();
        let svd = f.svd().unwrap();
        assert_eq!(svd.rank(), 8);
        let err = (svd.reconstruct(8) - f.dense().unwrap()).norm();
        assert!(err <= 1e-8 * 8.0);
    }

    #[test]
    fn smooth_derivatives_match_finite_differences() {
        for kind in [SmoothKind::QuadraticSum, SmoothKind::SinSum] {
            let h = 1e-5;
            for &(x, y) in &[(0.2, 0.3), (0.9, 0.1)] {
                for order in 0..3 {
                    let fd = (kind.dy(order, x, y + h) - kind.dy(order, x, y - h)) / (2.0 * h);
                    assert!((fd - kind.dy(order + 1, x, y)).abs() < 1e-6);
                }
            }
        }
    }
}
