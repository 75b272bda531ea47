//! Bit strings, bit-pair strings, and their shadows.
//!
//! A shadow replaces every nonzero unit by one plus the length of the zero run
//! immediately before it; the leftmost nonzero unit also absorbs the zero run
//! after the rightmost nonzero unit. Shadows of a nonzero string therefore sum
//! to the string length.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// An ordered string of bits, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    /// The low `len` bits of `value`, most significant first, zero-extended
    /// past 64 bits.
    pub fn from_u64(value: u64, len: usize) -> Self {
        Self { bits: (0..len).rev().map(|i| i < 64 && (value >> i) & 1 == 1).collect() }
    }

    pub fn to_u64(&self) -> Option<u64> {
        (self.bits.len() <= 64).then(|| self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn complement(&self) -> Self {
        Self { bits: self.bits.iter().map(|&b| !b).collect() }
    }

    pub fn concat(&self, other: &BitString) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self { bits: self.bits[range].to_vec() }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse { line: 1, message: format!("bad bit {other:?} at {i}") }),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::new)
    }
}

/// Bit pairs `B_1..B_m` with values 0..=3 encoding `00, 01, 10, 11`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPairString {
    pairs: Vec<u8>,
}

impl BitPairString {
    pub fn new(pairs: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = pairs.iter().find(|&&p| p > 3) {
            return Err(Error::InvalidElement(format!("pair value {bad}")));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[u8] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.iter().all(|&p| p == 0)
    }

    pub fn to_bits(&self) -> BitString {
        BitString::new(self.pairs.iter().flat_map(|&p| [p & 2 != 0, p & 1 != 0]).collect())
    }
}

/// Bit-pair shadows `𝓑_1..𝓑_m` plus the 0-based index of the leftmost
/// non-00 pair (the anchor).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairShadowString {
    pub shadows: Vec<u32>,
    pub anchor: usize,
}

/// Shadow of a unit string given which units are nonzero.
fn shadow_of(nonzero: &[bool]) -> Option<(Vec<u32>, usize)> {
    let anchor = nonzero.iter().position(|&x| x)?;
    let mut out = vec![0u32; nonzero.len()];
    let mut run = 0u32;
    for (i, &nz) in nonzero.iter().enumerate() {
        if nz {
            out[i] = run + 1;
            run = 0;
        } else {
            run += 1;
        }
    }
    out[anchor] += run;
    Some((out, anchor))
}

/// Bit shadows of a nonzero bit string.
pub fn bit_shadow(b: &BitString) -> Result<Vec<u32>> {
    shadow_of(b.bits()).map(|(s, _)| s).ok_or(Error::ZeroPlaintext)
}

/// Splits an even-length bit string into pairs, high bit first.
pub fn pair_string(b: &BitString) -> Result<BitPairString> {
    if !b.len().is_multiple_of(2) {
        return Err(Error::OddLength(b.len()));
    }
    let pairs = b
        .bits()
        .chunks_exact(2)
        .map(|c| ((c[0] as u8) << 1) | c[1] as u8)
        .collect();
    Ok(BitPairString { pairs })
}

/// Bit-pair shadows of a nonzero pair string.
pub fn pair_shadow(p: &BitPairString) -> Result<PairShadowString> {
    let nonzero: Vec<bool> = p.pairs().iter().map(|&x| x != 0).collect();
    shadow_of(&nonzero)
        .map(|(shadows, anchor)| PairShadowString { shadows, anchor })
        .ok_or(Error::ZeroPlaintext)
}

/// Spreads pair shadows over item slots: slot `3(i-1) + B_i` (1-based)
/// carries `𝓑_i`, every other slot is zero.
pub fn extended_shadow(p: &BitPairString) -> Result<Vec<u32>> {
    let s = pair_shadow(p)?;
    let mut out = vec![0u32; 3 * p.len()];
    for (i, (&b, &sh)) in p.pairs().iter().zip(&s.shadows).enumerate() {
        if b != 0 {
            out[3 * i + b as usize - 1] = sh;
        }
    }
    Ok(out)
}

/// Number of 00-pairs.
pub fn count_00(p: &BitPairString) -> usize {
    p.pairs().iter().filter(|&&x| x == 0).count()
}

pub fn complement(b: &BitString) -> BitString {
    b.complement()
}
