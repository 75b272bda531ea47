//! Scheme profiles, the lever set, and key generation.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::{self, build_modulus, element_order, find_generator, mod_inverse, ModulusRecord};
use crate::coprime::{gen_coprime_sequence, is_admissible, modulus_lower_bound, CoprimeSequence};
use crate::exec::Execution;
use crate::{Error, Result};

/// Public parameters of one instantiation of the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeProfile {
    /// Plaintext bits.
    pub n: usize,
    /// Padding bits appended before encryption; the first one is the
    /// complement flag.
    pub pad: usize,
    /// Bit-length of the modulus.
    pub tbar: u64,
    /// Largest admissible coprime-sequence element.
    pub pbar: u64,
    /// Required product of the smooth-part exponents of `M - 1`.
    pub min_exp_product: u64,
    /// `‖W‖ >= 2^min_order_bits`.
    pub min_order_bits: u32,
    /// Allow prime-power triples `(p^3, p^2, p)` in the private sequence.
    pub note2_relaxation: bool,
}

impl SchemeProfile {
    /// Desk-scale profile: 8-bit plaintexts, 12-bit padded strings, 48-bit modulus.
    pub const fn toy() -> Self {
        Self {
            n: 8,
            pad: 4,
            tbar: 48,
            pbar: 101,
            min_exp_product: 4,
            min_order_bits: 10,
            note2_relaxation: false,
        }
    }

    pub const fn n80() -> Self {
        Self::full(80, 464, 937, false)
    }

    /// 168 odd elements below 991 exceed the 166 odd primes there, so this
    /// profile needs prime-power triples.
    pub const fn n96() -> Self {
        Self::full(96, 544, 991, true)
    }

    pub const fn n112() -> Self {
        Self::full(112, 640, 1201, false)
    }

    const fn full(n: usize, tbar: u64, pbar: u64, note2_relaxation: bool) -> Self {
        Self {
            n,
            pad: 16,
            tbar,
            pbar,
            min_exp_product: 1 << 10,
            min_order_bits: (n - 20) as u32,
            note2_relaxation,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "toy" => Some(Self::toy()),
            "n80" => Some(Self::n80()),
            "n96" => Some(Self::n96()),
            "n112" => Some(Self::n112()),
            _ => None,
        }
    }

    pub fn name(&self) -> Option<&'static str> {
        ["toy", "n80", "n96", "n112"]
            .into_iter()
            .find(|name| Self::by_name(name).as_ref() == Some(self))
    }

    /// Rebuilds a profile from the four fields stored in key files. Named
    /// profiles are matched first; anything else gets desk-scale thresholds.
    pub fn from_header(n: usize, pad: usize, tbar: u64, pbar: u64) -> Result<Self> {
        let named = ["toy", "n80", "n96", "n112"]
            .into_iter()
            .filter_map(Self::by_name)
            .find(|p| p.n == n && p.pad == pad && p.tbar == tbar && p.pbar == pbar);
        let profile = named.unwrap_or(Self { n, pad, tbar, pbar, ..Self::toy() });
        profile.validate()?;
        Ok(profile)
    }

    /// `ñ = n + pad`.
    pub const fn ntilde(&self) -> usize {
        self.n + self.pad
    }

    /// Number of bit pairs, `ñ/2`.
    pub const fn pair_count(&self) -> usize {
        self.ntilde() / 2
    }

    /// Number of public-key items, `3ñ/2`.
    pub const fn item_count(&self) -> usize {
        3 * self.ntilde() / 2
    }

    /// Hard bound on `|k|` in the decryption search, `3ñ(ñ+1)/2`.
    pub const fn k_bound(&self) -> u64 {
        let nt = self.ntilde() as u64;
        3 * nt * (nt + 1) / 2
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidProfile(msg.to_string()));
        if self.n < 4 || !self.n.is_multiple_of(4) {
            return bad("n must be a positive multiple of 4");
        }
        if self.pad < 4 || !self.pad.is_multiple_of(4) {
            return bad("pad must be a positive multiple of 4");
        }
        if self.tbar < 8 {
            return bad("tbar too small");
        }
        if self.pbar < 3 {
            return bad("pbar too small");
        }
        Ok(())
    }
}

/// The secret lever values `ℓ(1)..ℓ(3ñ/2)`; triple `j` is a signed
/// permutation of `{6j-1, 6j+1, 6j+3}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeverSet {
    values: Vec<i64>,
}

impl LeverSet {
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `ℓ(i)` for a 0-based item index.
    pub fn get(&self, item: usize) -> i64 {
        self.values[item]
    }
}

/// Samples one of the `(3! * 2^3)^(ñ/2)` lever sets uniformly.
pub fn gen_omega<R: Rng + ?Sized>(ntilde: usize, rng: &mut R) -> LeverSet {
    assert!(ntilde.is_multiple_of(2), "ntilde must be even");
    let mut values = Vec::with_capacity(3 * ntilde / 2);
    for j in 1..=(ntilde / 2) as i64 {
        let mut triple = [6 * j - 1, 6 * j + 1, 6 * j + 3];
        triple.shuffle(rng);
        values.extend(triple.iter().map(|&v| if rng.gen_bool(0.5) { v } else { -v }));
    }
    LeverSet { values }
}

/// `({C_i}, M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    profile: SchemeProfile,
    items: Vec<BigUint>,
    modulus: BigUint,
}

impl PublicKey {
    pub fn new(profile: SchemeProfile, items: Vec<BigUint>, modulus: BigUint) -> Result<Self> {
        profile.validate()?;
        if items.len() != profile.item_count() {
            return Err(Error::Length { expected: profile.item_count(), actual: items.len() });
        }
        let one = BigUint::one();
        if let Some(c) = items.iter().find(|c| **c <= one || **c >= modulus) {
            return Err(Error::InvalidElement(format!("public item {c:x} outside (1, M)")));
        }
        Ok(Self { profile, items, modulus })
    }

    pub fn profile(&self) -> &SchemeProfile {
        &self.profile
    }

    pub fn items(&self) -> &[BigUint] {
        &self.items
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }
}

/// `({A_i}, W, δ, M)` with `δ^-1 mod (M-1)`, `W^-1`, and the product bound cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    profile: SchemeProfile,
    sequence: CoprimeSequence,
    w: BigUint,
    delta: BigUint,
    modulus: ModulusRecord,
    delta_inv: BigUint,
    w_inv: BigUint,
    product_bound: BigUint,
}

impl PrivateKey {
    pub fn new(
        profile: SchemeProfile,
        sequence: CoprimeSequence,
        w: BigUint,
        delta: BigUint,
        modulus: ModulusRecord,
    ) -> Result<Self> {
        profile.validate()?;
        if sequence.len() != profile.item_count() {
            return Err(Error::Length { expected: profile.item_count(), actual: sequence.len() });
        }
        if !sequence.is_odd() || !is_admissible(sequence.elements()) {
            return Err(Error::InvalidElement("private sequence must be odd and coprime".into()));
        }
        let m = modulus.modulus();
        if w <= BigUint::one() || &w >= m {
            return Err(Error::InvalidElement("W outside (1, M)".into()));
        }
        let order = modulus.order();
        if delta <= BigUint::one() || &delta >= order || !delta.gcd(order).is_one() {
            return Err(Error::InvalidElement("delta must lie in (1, M-1) and be coprime to M-1".into()));
        }
        let product_bound = modulus_lower_bound(&sequence, profile.ntilde());
        if &product_bound >= m {
            return Err(Error::InvalidElement("M does not exceed the product bound".into()));
        }
        let delta_inv = mod_inverse(&delta, order).expect("coprime to M - 1");
        let w_inv = mod_inverse(&w, m).ok_or_else(|| Error::NotInvertible(m.to_string()))?;
        Ok(Self { profile, sequence, w, delta, modulus, delta_inv, w_inv, product_bound })
    }

    pub fn profile(&self) -> &SchemeProfile {
        &self.profile
    }

    pub fn sequence(&self) -> &CoprimeSequence {
        &self.sequence
    }

    pub fn w(&self) -> &BigUint {
        &self.w
    }

    pub fn w_inv(&self) -> &BigUint {
        &self.w_inv
    }

    pub fn delta(&self) -> &BigUint {
        &self.delta
    }

    pub fn delta_inv(&self) -> &BigUint {
        &self.delta_inv
    }

    pub fn modulus(&self) -> &ModulusRecord {
        &self.modulus
    }

    /// Largest anomalous product an admissible plaintext can produce.
    pub fn product_bound(&self) -> &BigUint {
        &self.product_bound
    }
}

/// Key-generation secrets that the published formats never carry: the lever
/// set, `‖W‖`, and the generator `W` was derived from. Test and analysis use
/// only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DebugKey {
    pub private: PrivateKey,
    pub levers: LeverSet,
    pub w_order: BigUint,
    pub generator: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub public: PublicKey,
    pub private: PrivateKey,
    pub debug: DebugKey,
}

/// Generates a key pair: private sequence, modulus above its product bound,
/// lever set, `W = g^((M-1)/F)` of order `F`, a unit `δ`, and
/// `C_i = (A_i W^ℓ(i))^δ mod M`.
pub fn keygen<R: Rng + ?Sized>(profile: &SchemeProfile, rng: &mut R) -> Result<KeyPair> {
    profile.validate()?;
    let ntilde = profile.ntilde();
    let sequence = gen_coprime_sequence(profile, rng)?;
    let bound = modulus_lower_bound(&sequence, ntilde);
    let modulus = build_modulus(profile, &bound, rng)?;
    let levers = gen_omega(ntilde, rng);

    let m = modulus.modulus().clone();
    let order = modulus.order().clone();
    let generator = find_generator(&modulus, rng)?;
    let planted = modulus.planted_factor().ok_or(Error::MissingFactorization)?.clone();
    let w = generator.modpow(&(&order / &planted), &m);
    let w_order = element_order(&w, &modulus)?;
    if w_order.bits() <= profile.min_order_bits as u64 {
        return Err(Error::ModulusSearch(format!("‖W‖ has only {} bits", w_order.bits())));
    }

    let two = BigUint::from(2u32);
    let delta = loop {
        let d = rng.gen_biguint_range(&two, &order);
        if d.gcd(&order).is_one() {
            break d;
        }
    };

    let private = PrivateKey::new(*profile, sequence, w, delta, modulus)?;
    let items = public_items(&private, &levers, Execution::Parallel)?;
    let public = PublicKey::new(*profile, items, m)?;
    let debug = DebugKey { private: private.clone(), levers, w_order, generator };
    Ok(KeyPair { public, private, debug })
}

/// `C_i = (A_i W^ℓ(i))^δ mod M` for every item.
pub fn public_items(private: &PrivateKey, levers: &LeverSet, exec: Execution) -> Result<Vec<BigUint>> {
    let m = private.modulus().modulus();
    let elements = private.sequence().elements();
    let indices: Vec<usize> = (0..elements.len()).collect();
    exec.map(&indices, |&i| {
        let lever = arith::mod_pow(private.w(), &BigInt::from(levers.get(i)), m)?;
        Ok((lever * elements[i] % m).modpow(private.delta(), m))
    })
    .into_iter()
    .collect()
}
