//! Index-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the work is spread over the rayon pool;
//! without it, or with [`Execution::Sequential`], it runs in order. Output
//! order is always the index order.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

pub fn map_range<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Largest value of `f(i)` over `0..n`, ties broken by the smallest index.
pub fn max_by_range<T, F>(n: usize, exec: Execution, f: F) -> Option<(usize, T)>
where
    T: Send + PartialOrd,
    F: Fn(usize) -> T + Sync + Send,
{
    let pick = |a: (usize, T), b: (usize, T)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(|i| (i, f(i))).reduce_with(pick)
        }
        _ => (0..n).map(|i| (i, f(i))).reduce(pick),
    }
}
