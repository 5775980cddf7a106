use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::model::{CostLedger, Party, Quantizer};

/// Inner product of real vectors held by different parties, to additive
/// error `delta_err * |a| * |b|` with probability at least 0.9.
///
/// The sender of `a` and the receiver share `k = ceil(100 / delta_err^2)`
/// Rademacher vectors `u_i`. The sender transmits `|a|` as a 64-bit float
/// and each `<a / |a|, u_i>` quantized at precision `delta_err / 4`; the
/// receiver averages `<a / |a|, u_i> <b, u_i>` and rescales.
pub fn real_ip_sketch<R: Rng>(a: &[f64], b: &[f64], delta_err: f64, rng: &mut R) -> Result<(f64, CostLedger)> {
    real_ip_sketch_from(Party::Alice, a, b, delta_err, 100.0, rng)
}

/// [`real_ip_sketch`] with an explicit sender and sketch constant.
pub fn real_ip_sketch_from<R: Rng>(
    sender: Party,
    a: &[f64],
    b: &[f64],
    delta_err: f64,
    constant: f64,
    rng: &mut R,
) -> Result<(f64, CostLedger)> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("vectors", "zero-length input"));
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "sketch vector length",
            expected: a.len(),
            got: b.len(),
        });
    }
    if !(delta_err > 0.0) {
        return Err(invalid("delta_err", format!("must be positive, got {delta_err}")));
    }
    let len = a.len();
    let k = ((constant / (delta_err * delta_err)).ceil() as usize).max(1);
    let root = (len as f64).sqrt();
    let quant = Quantizer::new(-root, root, delta_err / 4.0)?;

    let norm_a = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut ledger = CostLedger::new();
    ledger.send(sender, 64, "sketch/norm");
    ledger.send_reals(sender, k, &quant, "sketch/projections");

    let mut words = vec![0u64; len.div_ceil(64)];
    let mut acc = 0.0;
    for _ in 0..k {
        rng.fill(&mut words[..]);
        let (mut au, mut bu) = (0.0, 0.0);
        for i in 0..len {
            let neg = (words[i / 64] >> (i % 64)) & 1 == 1;
            if neg {
                au -= a[i];
                bu -= b[i];
            } else {
                au += a[i];
                bu += b[i];
            }
        }
        if norm_a > 0.0 {
            acc += quant.quantize(au / norm_a).decoded * bu;
        }
    }
    Ok((norm_a * acc / k as f64, ledger))
}
