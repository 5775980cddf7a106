//! Fixed-point message encodings and their bit costs.
//!
//! A real in a window of width `W` sent at precision `eta` uses
//! `ceil(log2(W / eta)) + 1` bits: `2^bits` equal cells over the window,
//! decoded at the cell midpoint, so the decoding error is at most
//! `W / 2^(bits+1) <= eta / 4`. For the canonical window `[-1, 1]` this is
//! `ceil(log2(2 / eta)) + 1` bits.

use crate::error::{invalid, Result};

/// Bits to name one element of a domain of size `n`.
pub fn index_bits(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as u64
    }
}

/// Bits for a real in a window of width `width` at precision `eta`.
pub fn real_bits(width: f64, eta: f64) -> u64 {
    let ratio = width / eta;
    let whole = if ratio <= 1.0 { 0.0 } else { ratio.log2().ceil() };
    whole as u64 + 1
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantized {
    pub code: u64,
    pub bits: u64,
    pub decoded: f64,
}

/// A uniform quantizer over `[lo, hi]` at precision `eta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantizer {
    lo: f64,
    hi: f64,
    bits: u64,
}

impl Quantizer {
    pub fn new(lo: f64, hi: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(invalid("precision", format!("must be positive, got {eta}")));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid("window", format!("[{lo}, {hi}] is empty")));
        }
        let bits = real_bits(hi - lo, eta);
        if bits > 62 {
            return Err(invalid("precision", format!("{eta} needs {bits} bits")));
        }
        Ok(Self { lo, hi, bits })
    }

    /// The canonical `[-1, 1]` window.
    pub fn unit(eta: f64) -> Result<Self> {
        Self::new(-1.0, 1.0, eta)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    fn cells(&self) -> u64 {
        1u64 << self.bits
    }

    /// Worst-case `|decoded - value|` for in-window values.
    pub fn max_error(&self) -> f64 {
        (self.hi - self.lo) / (2.0 * self.cells() as f64)
    }

    /// Encodes `value`, clamping it into the window first.
    pub fn encode(&self, value: f64) -> u64 {
        let cells = self.cells();
        let t = ((value - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0);
        ((t * cells as f64).floor() as u64).min(cells - 1)
    }

    pub fn decode(&self, code: u64) -> f64 {
        let width = (self.hi - self.lo) / self.cells() as f64;
        self.lo + (code as f64 + 0.5) * width
    }

    pub fn quantize(&self, value: f64) -> Quantized {
        let code = self.encode(value);
        Quantized {
            code,
            bits: self.bits,
            decoded: self.decode(code),
        }
    }
}

/// Quantizes `value` in `[-1, 1]` at precision `eta` (`eta <= 2`).
pub fn quantize(value: f64, eta: f64) -> Result<Quantized> {
    if !(eta > 0.0) {
        return Err(invalid("precision", format!("must be positive, got {eta}")));
    }
    if eta > 2.0 {
        return Err(invalid("precision", format!("must be at most 2, got {eta}")));
    }
    if !(-1.0..=1.0).contains(&value) {
        return Err(invalid("value", format!("{value} outside [-1, 1]")));
    }
    Ok(Quantizer::unit(eta)?.quantize(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn index_bit_costs() {
        assert_eq!(index_bits(1), 0);
        assert_eq!(index_bits(2), 1);
        assert_eq!(index_bits(4), 2);
        assert_eq!(index_bits(5), 3);
        assert_eq!(index_bits(4096), 12);
    }

    #[test]
    fn zero_at_half_precision() {
        let q = quantize(0.0, 0.5).unwrap();
        assert_eq!(q.bits, 3);
        assert!((-0.25..=0.25).contains(&q.decoded));
    }

    #[test]
    fn one_bit_sign_code() {
        let q = quantize(1.0, 2.0).unwrap();
        assert_eq!(q.bits, 1);
        assert!((0.0..=2.0).contains(&q.decoded));
    }

    #[test]
    fn rejects_bad_precision() {
        assert!(quantize(0.1, 0.0).is_err());
        assert!(quantize(0.1, -1.0).is_err());
        assert!(quantize(0.1, 2.5).is_err());
        assert!(quantize(1.5, 0.1).is_err());
    }

    #[test]
    fn exhaustive_sweep_fine_precision() {
        let eta = 1e-3;
        let q = Quantizer::unit(eta).unwrap();
        let n = 100_000;
        let worst = (0..=n)
            .map(|i| -1.0 + 2.0 * i as f64 / n as f64)
            .map(|v| (q.decode(q.encode(v)) - v).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 5e-4, "worst {worst}");
        assert_eq!(q.bits(), (2.0f64 / eta).log2().ceil() as u64 + 1);
    }

    proptest! {
        #[test]
        fn round_trip_within_half_precision(v in -1.0f64..=1.0, eta in 1e-9f64..=2.0) {
            let q = quantize(v, eta).unwrap();
            prop_assert!((q.decoded - v).abs() <= eta / 2.0);
            prop_assert_eq!(q.bits, (2.0 / eta).log2().ceil().max(0.0) as u64 + 1);
            let qz = Quantizer::unit(eta).unwrap();
            prop_assert_eq!(qz.decode(q.code), q.decoded);
        }

        #[test]
        fn general_window_round_trip(lo in -5.0f64..0.0, w in 0.1f64..10.0, t in 0.0f64..=1.0, eta in 1e-6f64..1.0) {
            let q = Quantizer::new(lo, lo + w, eta).unwrap();
            let v = lo + t * w;
            prop_assert!((q.decode(q.encode(v)) - v).abs() <= q.max_error() * (1.0 + 1e-9));
            prop_assert!(q.max_error() <= eta / 2.0);
        }
    }
}
