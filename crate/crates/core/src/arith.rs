//! Modular arithmetic over a prime modulus `M` whose `M - 1` is built with a
//! known factorization, plus the primality and factoring helpers key
//! generation needs.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::keygen::SchemeProfile;
use crate::{Error, Result};

/// Miller-Rabin rounds used by [`is_probable_prime`].
pub const MILLER_RABIN_ROUNDS: usize = 40;

const MR_FIXED_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// A prime modulus `M` together with `M - 1` and, when known, its complete
/// factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusRecord {
    modulus: BigUint,
    order: BigUint,
    factors: Option<Vec<(BigUint, u32)>>,
    smooth: Vec<(u64, u32)>,
    planted: Option<BigUint>,
}

impl ModulusRecord {
    /// Wraps a prime `M` with a claimed factorization of `M - 1`.
    ///
    /// The factorization is checked to multiply out to `M - 1` and every listed
    /// factor is checked for primality.
    pub fn from_factorization(modulus: BigUint, factors: Vec<(BigUint, u32)>) -> Result<Self> {
        if modulus < BigUint::from(2u32) || !is_probable_prime(&modulus) {
            return Err(Error::InvalidElement(format!("{modulus:x} is not prime")));
        }
        let order = &modulus - 1u32;
        let mut product = BigUint::one();
        for (p, e) in &factors {
            if !is_probable_prime(p) {
                return Err(Error::InvalidElement(format!("factor {p} is not prime")));
            }
            product *= p.pow(*e);
        }
        if product != order {
            return Err(Error::InvalidElement("factorization does not multiply to M - 1".into()));
        }
        Ok(Self { modulus, order, factors: Some(factors), smooth: Vec::new(), planted: None })
    }

    /// A prime modulus with no factorization attached (e.g. loaded from a key
    /// file for a large profile).
    pub fn without_factorization(modulus: BigUint) -> Self {
        let order = &modulus - 1u32;
        Self { modulus, order, factors: None, smooth: Vec::new(), planted: None }
    }

    /// Rebuilds the factorization of `M - 1` for moduli below 2^64.
    pub fn recover(modulus: &BigUint) -> Result<Self> {
        let m = modulus
            .to_u64()
            .ok_or_else(|| Error::Unsupported("factoring M - 1 needs M < 2^64".into()))?;
        let factors = factor_u64(m - 1)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
        Self::from_factorization(modulus.clone(), factors)
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// `M - 1`, the order of the multiplicative group.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn factors(&self) -> Option<&[(BigUint, u32)]> {
        self.factors.as_deref()
    }

    /// The planted smooth part `(p_i, e_i)` over the first primes.
    pub fn smooth_part(&self) -> &[(u64, u32)] {
        &self.smooth
    }

    /// The planted prime `F` that fixes the order of `W`.
    pub fn planted_factor(&self) -> Option<&BigUint> {
        self.planted.as_ref()
    }

    pub fn bits(&self) -> u64 {
        self.modulus.bits()
    }

    fn require_factors(&self) -> Result<&[(BigUint, u32)]> {
        self.factors.as_deref().ok_or(Error::MissingFactorization)
    }
}

/// `base^exponent mod modulus`, with negative exponents resolved through the
/// modular inverse.
pub fn mod_pow(base: &BigUint, exponent: &BigInt, modulus: &BigUint) -> Result<BigUint> {
    let magnitude = exponent.magnitude();
    match exponent.sign() {
        Sign::Minus => {
            let inv = mod_inverse(base, modulus)
                .ok_or_else(|| Error::NotInvertible(modulus.to_string()))?;
            Ok(inv.modpow(magnitude, modulus))
        }
        _ => Ok(base.modpow(magnitude, modulus)),
    }
}

/// `base^exponent mod modulus` for a small signed exponent.
pub fn mod_pow_i64(base: &BigUint, exponent: i64, modulus: &BigUint) -> Result<BigUint> {
    mod_pow(base, &BigInt::from(exponent), modulus)
}

pub fn mod_inverse(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    if modulus.is_one() {
        return None;
    }
    let a = a % modulus;
    if a.is_zero() {
        return None;
    }
    a.modinv(modulus)
}

/// Remainder of a big integer by a machine word, without allocating.
pub fn rem_u64(n: &BigUint, d: u64) -> u64 {
    let d = d as u128;
    let mut r: u128 = 0;
    for digit in n.iter_u64_digits().rev() {
        r = ((r << 64) | digit as u128) % d;
    }
    r as u64
}

/// Miller-Rabin with [`MILLER_RABIN_ROUNDS`] bases: twelve fixed small primes
/// plus pseudo-random bases from a fixed-seed stream, so the answer is a pure
/// function of `n`.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in SMALL_PRIMES.iter() {
        if rem_u64(n, p) == 0 {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;

    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            return false;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_one {
                return false;
            }
            if x == one {
                return true;
            }
        }
        true
    };

    for &b in MR_FIXED_BASES.iter() {
        if witness(&BigUint::from(b)) {
            return false;
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0x4a55_4e41);
    let two = BigUint::from(2u32);
    let upper = n - &one;
    for _ in MR_FIXED_BASES.len()..MILLER_RABIN_ROUNDS {
        let a = rng.gen_biguint_range(&two, &upper);
        if witness(&a) {
            return false;
        }
    }
    true
}

const SMALL_PRIMES: [u64; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in SMALL_PRIMES.iter() {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in MR_FIXED_BASES.iter() {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// All primes strictly below `limit`.
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut sieve = vec![true; limit];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < limit {
        if sieve[i] {
            let mut j = i * i;
            while j < limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| p.then_some(k as u64))
        .collect()
}

fn pollard_brent(n: u64, seed: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let c = seed % (n - 1) + 1;
    let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
    let mut y = seed % n;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..(128.min(r - k)) {
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += 128;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    g
}

/// Complete factorization of a 64-bit integer: trial division by small primes,
/// then Brent's variant of Pollard rho.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out: BTreeMap<u64, u32> = BTreeMap::new();
    let mut rest = n;
    for &p in SMALL_PRIMES.iter() {
        while rest.is_multiple_of(p) {
            *out.entry(p).or_default() += 1;
            rest /= p;
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            *out.entry(m).or_default() += 1;
            continue;
        }
        let mut seed = 2;
        let d = loop {
            let d = pollard_brent(m, seed);
            if d != m {
                break d;
            }
            seed += 1;
        };
        stack.push(d);
        stack.push(m / d);
    }
    out.into_iter().collect()
}

/// Random prime with exactly `bits` bits.
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 2, "a prime needs at least two bits");
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        if bits > 2 {
            candidate.set_bit(0, true);
        }
        if is_probable_prime(&candidate) {
            return candidate;
        }
    }
}

/// Exponents `e_1..e_k` over the first primes below `ntilde` with
/// `prod e_i >= min_product`, greedily trading the fewest added bits per unit
/// of product growth.
fn smooth_exponents(ntilde: u64, min_product: u64) -> Result<Vec<(u64, u32)>> {
    let primes = primes_below(ntilde);
    if primes.is_empty() {
        return Err(Error::InvalidProfile(format!("no primes below ntilde = {ntilde}")));
    }
    let want = (min_product.max(1) as f64).log2();
    let k = ((want / 2.0).ceil() as usize).clamp(1, primes.len());
    let mut exps: Vec<(u64, u32)> = primes[..k].iter().map(|&p| (p, 1)).collect();
    let product = |e: &[(u64, u32)]| e.iter().map(|&(_, x)| x as u64).product::<u64>();
    while product(&exps) < min_product {
        let best = exps
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| {
                let gain = |&(p, e): &(u64, u32)| ((e + 1) as f64 / e as f64).ln() / (p as f64).ln();
                gain(a).total_cmp(&gain(b))
            })
            .map(|(i, _)| i)
            .expect("nonempty");
        exps[best].1 += 1;
    }
    Ok(exps)
}

/// Builds a prime `M` of exactly `profile.tbar` bits with `M > lower_bound`
/// and `M - 1 = S * F * q * c`, where `S` is the smooth part over the first
/// primes below `ntilde`, `F` a random prime of `min_order_bits + 1` bits,
/// `q` a random prime and `c` a small swept cofactor. The factorization of
/// `M - 1` is complete by construction.
pub fn build_modulus<R: Rng + ?Sized>(
    profile: &SchemeProfile,
    lower_bound: &BigUint,
    rng: &mut R,
) -> Result<ModulusRecord> {
    let tbar = profile.tbar;
    let top = BigUint::one() << tbar;
    if lower_bound >= &(&top - 1u32) {
        return Err(Error::ModulusSearch(format!(
            "lower bound has {} bits, modulus is limited to {tbar}",
            lower_bound.bits()
        )));
    }
    let smooth = smooth_exponents(profile.ntilde() as u64, profile.min_exp_product)?;
    let smooth_value: BigUint = smooth
        .iter()
        .map(|&(p, e)| BigUint::from(p).pow(e))
        .product();
    let order_bits = profile.min_order_bits as u64;

    let floor = (BigUint::one() << (tbar - 1)).max(lower_bound + 1u32);
    let ceil = &top - 1u32;

    for _ in 0..16 {
        let planted = random_prime(order_bits + 1, rng);
        let base = &smooth_value * &planted;
        let base_bits = base.bits();
        if base_bits + 4 > tbar {
            return Err(Error::ModulusSearch(format!(
                "smooth part and planted factor use {base_bits} of {tbar} bits"
            )));
        }
        let rest_bits = tbar - base_bits;
        let (q, c_bits) = if rest_bits <= 24 {
            (BigUint::one(), rest_bits)
        } else {
            let c_bits = (rest_bits / 2).min(20);
            (random_prime(rest_bits - c_bits, rng), c_bits)
        };
        let unit = &base * &q;
        // M - 1 = unit * c must land in [floor - 1, ceil - 1].
        let c_lo = (&floor - 1u32).div_ceil(&unit).max(BigUint::one());
        let c_hi = (&ceil - 1u32) / &unit;
        if c_lo > c_hi {
            continue;
        }
        let span = (&c_hi - &c_lo + 1u32).to_u64().unwrap_or(u64::MAX);
        let budget = span.min(1 << c_bits.min(22)).max(1);
        let start = rng.gen_range(0..span);
        for step in 0..budget {
            let c = &c_lo + ((start + step) % span);
            let order = &unit * &c;
            let candidate = &order + 1u32;
            if !is_probable_prime(&candidate) {
                continue;
            }
            let c_small = c.to_u64().expect("cofactor fits a word");
            let mut map: BTreeMap<BigUint, u32> = BTreeMap::new();
            for &(p, e) in &smooth {
                *map.entry(BigUint::from(p)).or_default() += e;
            }
            *map.entry(planted.clone()).or_default() += 1;
            if !q.is_one() {
                *map.entry(q.clone()).or_default() += 1;
            }
            for (p, e) in factor_u64(c_small) {
                *map.entry(BigUint::from(p)).or_default() += e;
            }
            let mut record = ModulusRecord::from_factorization(candidate, map.into_iter().collect())?;
            record.smooth = smooth;
            record.planted = Some(planted);
            return Ok(record);
        }
    }
    Err(Error::ModulusSearch(format!("no {tbar}-bit prime found within the trial budget")))
}

/// Order of `x` in the multiplicative group modulo `M`, using the stored
/// factorization of `M - 1`.
pub fn element_order(x: &BigUint, m: &ModulusRecord) -> Result<BigUint> {
    if x.is_zero() || x >= m.modulus() {
        return Err(Error::InvalidElement(x.to_string()));
    }
    let factors = m.require_factors()?;
    let mut order = m.order().clone();
    for (p, e) in factors {
        for _ in 0..*e {
            let reduced = &order / p;
            if x.modpow(&reduced, m.modulus()).is_one() {
                order = reduced;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// A generator of the multiplicative group: random candidates are rejected
/// while `a^((M-1)/p) = 1` for some prime `p | M - 1`.
pub fn find_generator<R: Rng + ?Sized>(m: &ModulusRecord, rng: &mut R) -> Result<BigUint> {
    let factors = m.require_factors()?;
    let modulus = m.modulus();
    if modulus <= &BigUint::from(3u32) {
        return Ok(modulus - 1u32);
    }
    let two = BigUint::from(2u32);
    loop {
        let a = rng.gen_biguint_range(&two, modulus);
        if factors
            .iter()
            .all(|(p, _)| !a.modpow(&(m.order() / p), modulus).is_one())
        {
            return Ok(a);
        }
    }
}
