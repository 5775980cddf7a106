use crate::model::{ProbVec, SignedVec};

/// Keeps the entries of `p` with mass at least `eps`.
///
/// At most `1 / eps` entries survive, and for every `q` the inner product
/// drops by at most `2 eps`.
pub fn heavy_truncate(p: &ProbVec, eps: f64) -> SignedVec {
    let kept = p.support().filter(|&(_, m)| m >= eps);
    SignedVec::from_sparse(p.domain_size(), kept).expect("entries come from a valid distribution")
}

/// `sum_x a(x) b(x)` for sparse nonnegative vectors sorted by index.
pub fn sparse_inner(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}
