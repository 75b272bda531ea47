//! Conversion of an anomalous subset product instance into an additive
//! compact sequence by taking discrete logs of the public items.

use num_traits::ToPrimitive;

use super::density::{density_bitpair, Density};
use super::dlog::{discrete_log, mul_mod, smallest_generator};
use crate::arith::factor_u64;
use crate::codec::Ciphertext;
use crate::keygen::PublicKey;
use crate::{Error, Result};

/// `u_i = log_g C_i` and `v = log_g Ḡ`, both modulo `M̄ = M - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactSequence {
    pub u: Vec<u64>,
    pub v: u64,
    pub mbar: u64,
    pub generator: u64,
}

impl CompactSequence {
    /// Whether `Σ u_i b_i = v (mod M̄)`.
    pub fn satisfies(&self, b: &[u32]) -> bool {
        if b.len() != self.u.len() {
            return false;
        }
        let sum = self
            .u
            .iter()
            .zip(b)
            .fold(0u64, |acc, (&u, &bi)| (acc + mul_mod(u, bi as u64, self.mbar)) % self.mbar);
        sum == self.v
    }

    /// Density of the knapsack for a padded length `ñ = 2 * len / 3`.
    pub fn density(&self) -> Density {
        let ntilde = 2 * self.u.len() as u64 / 3;
        density_bitpair(ntilde, 64 - self.mbar.leading_zeros() as u64)
    }
}

/// Takes discrete logs of every public item and of the ciphertext to the
/// smallest generator of `Z_M^*`. Needs `M < 2^64` so that `M - 1` can be
/// factored and each prime-order subgroup searched.
pub fn aspp_to_assp(public: &PublicKey, c: &Ciphertext) -> Result<CompactSequence> {
    let m = public
        .modulus()
        .to_u64()
        .ok_or_else(|| Error::Unsupported(format!("discrete logs need M < 2^64, M has {} bits", public.modulus().bits())))?;
    let target = c
        .value()
        .to_u64()
        .filter(|&x| x > 0 && x < m)
        .ok_or_else(|| Error::InvalidElement("ciphertext outside (0, M)".into()))?;
    let factors = factor_u64(m - 1);
    let generator = smallest_generator(m, &factors).ok_or_else(|| Error::Dlog("no generator".into()))?;
    let u = public
        .items()
        .iter()
        .map(|ci| discrete_log(generator, ci.to_u64().expect("item below M"), m, &factors))
        .collect::<Result<Vec<_>>>()?;
    let v = discrete_log(generator, target, m, &factors)?;
    Ok(CompactSequence { u, v, mbar: m - 1, generator })
}
