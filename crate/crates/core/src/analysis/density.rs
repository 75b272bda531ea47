//! Knapsack densities and bounds on the lever exponent `k`.

use std::fmt;

/// Number of binary digits of `x`, i.e. `⌊lg x⌋ + 1`. The density and
/// cost formulas read `⌈lg x⌉` this way.
pub fn bit_length(x: u64) -> u64 {
    (u64::BITS - x.leading_zeros()) as u64
}

/// A density as an exact fraction plus its decimal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Density {
    pub numerator: u64,
    pub denominator: u64,
}

impl Density {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.value())
    }
}

/// `3ñ ⌈lg(ñ/4 + 1)⌉ / (2 ⌈lg M⌉)`.
pub fn density_bitpair(ntilde: u64, lg_m: u64) -> Density {
    assert!(ntilde > 0 && lg_m > 0);
    Density { numerator: 3 * ntilde * bit_length(ntilde / 4 + 1), denominator: 2 * lg_m }
}

/// `n ⌈lg n⌉ / ⌈lg M⌉`.
pub fn density_bit(n: u64, lg_m: u64) -> Density {
    assert!(n > 0 && lg_m > 0);
    Density { numerator: n * bit_length(n), denominator: lg_m }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KBounds {
    /// `(3/16) ñ (7ñ + 12)`.
    pub k_max: u64,
    /// `k_max / 2`.
    pub k_expected: f64,
    /// `3ñ(ñ + 1)/2`, the bound the decryption search enforces.
    pub k_abs_bound: u64,
}

pub fn k_bounds(ntilde: u64) -> KBounds {
    assert!(ntilde.is_multiple_of(2), "ntilde must be even");
    let k_max = 3 * ntilde * (7 * ntilde + 12) / 16;
    KBounds {
        k_max,
        k_expected: 3.0 * ntilde as f64 * (7 * ntilde + 12) as f64 / 32.0,
        k_abs_bound: 3 * ntilde * (ntilde + 1) / 2,
    }
}
