use std::collections::BTreeMap;

use super::TrialRecord;
use crate::error::{invalid, Result};

/// Two-sided 99% normal quantile.
pub const WILSON_Z_99: f64 = 2.5758;

/// Wilson score interval for `hits` out of `n`.
pub fn wilson_interval(hits: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let phat = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Per-epsilon error and cost statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonSummary {
    pub epsilon: f64,
    pub trials: usize,
    /// Trials with `abs_error > epsilon`.
    pub failures: usize,
    pub failure_rate: f64,
    /// 99% Wilson interval on the failure probability.
    pub failure_ci: (f64, f64),
    pub median_bits: f64,
    pub mean_squared_error: f64,
}

/// Groups records by epsilon, largest first.
pub fn by_epsilon(records: &[TrialRecord]) -> BTreeMap<u64, Vec<&TrialRecord>> {
    let mut groups: BTreeMap<u64, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        // Positive floats order like their bit patterns; negate to sort descending.
        groups.entry(u64::MAX - r.epsilon.to_bits()).or_default().push(r);
    }
    groups
}

pub fn summarize(records: &[TrialRecord]) -> Vec<EpsilonSummary> {
    by_epsilon(records)
        .into_values()
        .map(|group| {
            let epsilon = group[0].epsilon;
            let failures = group.iter().filter(|r| r.abs_error > epsilon).count();
            let mut bits: Vec<f64> = group.iter().map(|r| r.total_bits() as f64).collect();
            let mut sq: Vec<(usize, f64)> = group.iter().map(|r| (r.trial, r.abs_error * r.abs_error)).collect();
            sq.sort_by_key(|e| e.0);
            EpsilonSummary {
                epsilon,
                trials: group.len(),
                failures,
                failure_rate: failures as f64 / group.len() as f64,
                failure_ci: wilson_interval(failures, group.len(), WILSON_Z_99),
                median_bits: median(&mut bits).unwrap_or(0.0),
                mean_squared_error: sq.iter().map(|e| e.1).sum::<f64>() / group.len() as f64,
            }
        })
        .collect()
}

/// Least-squares line through `(ln(1/eps), ln(median bits))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_points(points: Vec<(f64, f64)>) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(invalid("epsilons", format!("need at least 3 distinct values, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("epsilons", "all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        points,
    })
}

pub fn fit_scaling(records: &[TrialRecord]) -> Result<ScalingFit> {
    let points = summarize(records)
        .into_iter()
        .map(|s| ((1.0 / s.epsilon).ln(), s.median_bits.max(1.0).ln()))
        .collect();
    fit_points(points)
}
