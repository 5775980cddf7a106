use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::model::{rng_from_seed, FamilySpec, SmoothKind};

pub const FAMILY_NAMES: [&str; 11] = [
    "eq", "identity", "gt", "ip", "abs", "smooth", "toeplitz", "hadamard", "distance", "double_index",
    "random_boolean",
];

/// Piecewise-constant diagonals with `changes` jumps, values in `{-1, -1/2, 0, 1/2, 1}`.
pub fn random_toeplitz(size: usize, changes: usize, seed: u64) -> FamilySpec {
    let len = 2 * size - 1;
    let mut rng = rng_from_seed(seed);
    let mut cuts: Vec<usize> = (0..changes.min(len - 1)).map(|_| rng.random_range(1..len)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut value = rng.random_range(-2i32..=2) as f64 / 2.0;
    let mut diagonals = Vec::with_capacity(len);
    for l in 0..len {
        if cuts.binary_search(&l).is_ok() {
            let mut next = value;
            while next == value {
                next = rng.random_range(-2i32..=2) as f64 / 2.0;
            }
            value = next;
        }
        diagonals.push(value);
    }
    FamilySpec::Toeplitz { diagonals }
}

/// Family by name. `bits` describes `{0,1}^bits` families; `size` (if
/// given) overrides the domain size `2^bits` of the others.
pub fn family_from_name(name: &str, bits: Option<u32>, size: Option<usize>, seed: u64) -> Result<FamilySpec> {
    let need_bits = || bits.ok_or_else(|| invalid("n", format!("family {name} needs --n")));
    let size = || -> Result<usize> {
        match (size, bits) {
            (Some(k), _) => Ok(k),
            (None, Some(b)) if b < 32 => Ok(1usize << b),
            (None, Some(b)) => Err(invalid("n", format!("{b} bits is too large"))),
            (None, None) => Err(invalid("k", format!("family {name} needs --k or --n"))),
        }
    };
    let grid = |s: usize| -> Result<usize> {
        if s < 2 {
            return Err(invalid("k", "grid families need at least 2 points"));
        }
        Ok(s - 1)
    };
    Ok(match name {
        "eq" | "identity" => FamilySpec::Eq { size: size()? },
        "gt" => FamilySpec::Gt { size: size()? },
        "ip" => FamilySpec::Ip { n: need_bits()? },
        "abs" => FamilySpec::AbsGrid { m: grid(size()?)? },
        "smooth" => FamilySpec::SmoothGrid {
            m: grid(size()?)?,
            kind: SmoothKind::SinSum,
        },
        "toeplitz" => random_toeplitz(size()?, 3, seed),
        "hadamard" => FamilySpec::Hadamard { k: size()? },
        "distance" => FamilySpec::Distance { k: size()? },
        "double_index" => FamilySpec::DoubleIndex { k: need_bits()? },
        "random_boolean" => FamilySpec::RandomBoolean { n: need_bits()?, seed },
        other => {
            return Err(Error::Unknown {
                kind: "family",
                name: other.to_string(),
            })
        }
    })
}
