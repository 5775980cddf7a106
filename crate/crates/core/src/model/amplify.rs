//! Success amplification by the median of independent runs.

use super::ledger::CostLedger;
use crate::error::Result;

/// Odd run count whose median fails with probability at most `delta` when
/// each run independently fails with probability at most `base` (< 1/2).
/// Hoeffding on the count of failed runs.
pub fn amplification_runs(delta: f64, base: f64) -> usize {
    if delta >= base {
        return 1;
    }
    let gap = 0.5 - base;
    let r = ((1.0 / delta).ln() / (2.0 * gap * gap)).ceil() as usize;
    r.max(1) | 1
}

/// Runs `run` for each index and returns the median estimate with the
/// concatenated transcript.
pub fn median_of_runs<F>(runs: usize, mut run: F) -> Result<(f64, CostLedger)>
where
    F: FnMut(usize) -> Result<(f64, CostLedger)>,
{
    let mut ledger = CostLedger::new();
    let mut estimates = Vec::with_capacity(runs);
    for i in 0..runs {
        let (est, l) = run(i)?;
        let prefix = if runs == 1 { String::new() } else { format!("run{i}") };
        ledger.extend(&l, &prefix);
        estimates.push(est);
    }
    estimates.sort_by(f64::total_cmp);
    Ok((estimates[estimates.len() / 2], ledger))
}
