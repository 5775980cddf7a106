//! Interval partitions of an ordered domain `0..N`.

use crate::model::ProbVec;

/// Disjoint intervals `[starts[j], starts[j + 1])` covering `0..domain_size`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionSpec {
    pub domain_size: usize,
    /// Strictly increasing interval starts; the first is 0.
    pub endpoints: Vec<usize>,
    /// Mass of each interval under the distribution it was built from.
    pub masses: Vec<f64>,
    /// Conditional means of the grid coordinate `i / (N - 1)`, per interval.
    pub cond_means: Option<Vec<f64>>,
    /// Intervals that are single atoms of mass above the threshold.
    pub heavy_atoms: Vec<usize>,
}

impl PartitionSpec {
    pub fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    /// `[start, end)` of interval `j`.
    pub fn interval(&self, j: usize) -> (usize, usize) {
        let end = self.endpoints.get(j + 1).copied().unwrap_or(self.domain_size);
        (self.endpoints[j], end)
    }

    /// Index of the interval containing `x`.
    pub fn locate(&self, x: usize) -> usize {
        self.endpoints.partition_point(|&s| s <= x) - 1
    }

    pub fn is_singleton(&self, j: usize) -> bool {
        let (a, b) = self.interval(j);
        b - a == 1
    }
}

/// Greedy left-to-right partition of `p` at threshold `beta`.
///
/// Points of mass above `beta` become singleton intervals. Otherwise an
/// interval is closed when the next point would push its mass above `beta`
/// or, when `strong` is set, its width above `beta` (grid units, the domain
/// spanning `[0, 1]`).
pub fn interval_partition(p: &ProbVec, beta: f64, strong: bool) -> PartitionSpec {
    let n = p.domain_size();
    let mass = p.to_dense();
    let span = (n.max(2) - 1) as f64;
    let mut endpoints = vec![0usize];
    let mut masses = Vec::new();
    let mut heavy_atoms = Vec::new();
    let mut acc = 0.0;

    let close = |endpoints: &mut Vec<usize>, masses: &mut Vec<f64>, acc: &mut f64, at: usize| {
        masses.push(*acc);
        endpoints.push(at);
        *acc = 0.0;
    };

    for (x, &m) in mass.iter().enumerate() {
        let start = *endpoints.last().unwrap();
        if m > beta {
            if x > start {
                close(&mut endpoints, &mut masses, &mut acc, x);
            }
            heavy_atoms.push(endpoints.len() - 1);
            acc = m;
            close(&mut endpoints, &mut masses, &mut acc, x + 1);
            continue;
        }
        let too_heavy = acc + m > beta;
        let too_wide = strong && (x - start) as f64 > beta * span;
        if x > start && (too_heavy || too_wide) {
            close(&mut endpoints, &mut masses, &mut acc, x);
        }
        acc += m;
    }
    if *endpoints.last().unwrap() < n {
        masses.push(acc);
    } else {
        endpoints.pop();
    }
    PartitionSpec {
        domain_size: n,
        endpoints,
        masses,
        cond_means: None,
        heavy_atoms,
    }
}

/// Union of the interval starts of `a` and `b`.
pub fn common_refinement(a: &PartitionSpec, b: &PartitionSpec) -> Vec<usize> {
    let mut starts: Vec<usize> = a.endpoints.iter().chain(&b.endpoints).copied().collect();
    starts.sort_unstable();
    starts.dedup();
    starts
}

/// Masses and grid conditional means of `p` on the intervals with `starts`.
pub(crate) fn interval_stats(p: &ProbVec, starts: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let n = p.domain_size();
    let span = (n.max(2) - 1) as f64;
    let mut mass = vec![0.0; starts.len()];
    let mut first = vec![0.0; starts.len()];
    for (x, m) in p.support() {
        let j = starts.partition_point(|&s| s <= x) - 1;
        mass[j] += m;
        first[j] += m * x as f64 / span;
    }
    let means = starts
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            if mass[j] > 0.0 {
                first[j] / mass[j]
            } else {
                let end = starts.get(j + 1).copied().unwrap_or(n);
                (s + end - 1) as f64 / (2.0 * span)
            }
        })
        .collect();
    (mass, means)
}
