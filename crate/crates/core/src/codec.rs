//! Probabilistic encryption and maze-search decryption.
//!
//! A plaintext is complemented when it has too many 00-pairs, padded with the
//! complement flag and random filler, and split into bit pairs. Each non-00
//! pair `B_i` with shadow `𝓑_i` raises one public item to `𝓑_i`; the r-string
//! decides whether that item comes from pair `i`'s own triple or from the
//! first triple of its zero run.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::arith::rem_u64;
use crate::coprime::CoprimeSequence;
use crate::keygen::{LeverSet, PrivateKey, PublicKey, SchemeProfile};
use crate::shadow::{count_00, pair_shadow, pair_string, BitPairString, BitString, PairShadowString};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ciphertext(pub BigUint);

impl Ciphertext {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

/// Everything encryption decided on the way to a ciphertext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptionTranscript {
    /// Stored plaintext, complement flag, and filler.
    pub padded: BitString,
    pub inverted: bool,
    pub pairs: BitPairString,
    pub shadow: PairShadowString,
    /// The r-string as used, with the anchor bit forced to 1.
    pub r: BitString,
    /// 0-based public-item index used by each pair; `None` for 00-pairs.
    pub indices: Vec<Option<usize>>,
}

impl EncryptionTranscript {
    /// `k = Σ 𝓑_i ℓ(index_i)`, the lever exponent carried by the ciphertext.
    pub fn lever_sum(&self, levers: &LeverSet) -> i64 {
        self.indices
            .iter()
            .zip(&self.shadow.shadows)
            .filter_map(|(idx, &s)| idx.map(|i| s as i64 * levers.get(i)))
            .sum()
    }

    /// Exponent of every public item in the ciphertext.
    pub fn item_exponents(&self) -> Vec<u32> {
        let mut out = vec![0u32; 3 * self.pairs.len()];
        for (idx, &s) in self.indices.iter().zip(&self.shadow.shadows) {
            if let Some(i) = idx {
                out[*i] += s;
            }
        }
        out
    }
}

/// Output of [`decrypt_detailed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decryption {
    pub plaintext: BitString,
    pub padded: BitString,
    /// A canonical r-string consistent with the ciphertext; bits of pairs
    /// whose shadow is 1 read as 1.
    pub r: BitString,
    /// The lever exponent the search stopped at.
    pub k: i64,
    /// Candidates `k` examined, including the accepted one.
    pub steps: u64,
}

/// Item index for pair `i` (0-based) with value `b`, shadow `s`, and r-bit `r`.
fn item_index(i: usize, b: u8, s: u32, r: bool) -> usize {
    let triple = if r { i } else { i + 1 - s as usize };
    3 * triple + b as usize - 1
}

/// Plaintext after the complement rule, plus the flag.
fn canonical_plaintext(profile: &SchemeProfile, plaintext: &BitString) -> Result<(BitString, bool)> {
    if plaintext.len() != profile.n {
        return Err(Error::Length { expected: profile.n, actual: plaintext.len() });
    }
    if plaintext.is_zero() {
        return Err(Error::ZeroPlaintext);
    }
    if count_00(&pair_string(plaintext)?) > profile.n / 4 {
        Ok((plaintext.complement(), true))
    } else {
        Ok((plaintext.clone(), false))
    }
}

/// Encrypts with caller-chosen randomness: `filler` has `pad - 1` bits and
/// `r` has `ñ/2` bits. The anchor bit of `r` is forced to 1.
pub fn encrypt_deterministic(
    public: &PublicKey,
    plaintext: &BitString,
    filler: &BitString,
    r: &BitString,
) -> Result<(Ciphertext, EncryptionTranscript)> {
    let profile = public.profile();
    let (stored, inverted) = canonical_plaintext(profile, plaintext)?;
    if filler.len() != profile.pad - 1 {
        return Err(Error::Length { expected: profile.pad - 1, actual: filler.len() });
    }
    if r.len() != profile.pair_count() {
        return Err(Error::Length { expected: profile.pair_count(), actual: r.len() });
    }
    let padded = stored.concat(&BitString::new(vec![inverted])).concat(filler);
    let pairs = pair_string(&padded)?;
    let zero_pairs = count_00(&pairs);
    if zero_pairs > profile.ntilde() / 4 {
        return Err(Error::TooManyZeroPairs { zero_pairs, limit: profile.ntilde() / 4 });
    }
    let shadow = pair_shadow(&pairs)?;
    let mut r_bits = r.bits().to_vec();
    r_bits[shadow.anchor] = true;

    let m = public.modulus();
    let mut g = BigUint::one();
    let mut indices = Vec::with_capacity(pairs.len());
    for (i, (&b, &s)) in pairs.pairs().iter().zip(&shadow.shadows).enumerate() {
        if b == 0 {
            indices.push(None);
            continue;
        }
        let idx = item_index(i, b, s, r_bits[i]);
        g = g * public.items()[idx].modpow(&BigUint::from(s), m) % m;
        indices.push(Some(idx));
    }
    let transcript = EncryptionTranscript {
        padded,
        inverted,
        pairs,
        shadow,
        r: BitString::new(r_bits),
        indices,
    };
    Ok((Ciphertext(g), transcript))
}

/// Encrypts with fresh filler and r-string drawn from `rng`.
pub fn encrypt<R: Rng + ?Sized>(public: &PublicKey, plaintext: &BitString, rng: &mut R) -> Result<Ciphertext> {
    encrypt_with_transcript(public, plaintext, rng).map(|(c, _)| c)
}

pub fn encrypt_with_transcript<R: Rng + ?Sized>(
    public: &PublicKey,
    plaintext: &BitString,
    rng: &mut R,
) -> Result<(Ciphertext, EncryptionTranscript)> {
    let profile = public.profile();
    let (stored, inverted) = canonical_plaintext(profile, plaintext)?;
    let head = count_00(&pair_string(&stored)?);
    let limit = profile.ntilde() / 4;
    let filler = loop {
        let f = BitString::new((0..profile.pad - 1).map(|_| rng.gen()).collect());
        let tail = BitString::new(vec![inverted]).concat(&f);
        if head + count_00(&pair_string(&tail)?) <= limit {
            break f;
        }
    };
    let r = BitString::new((0..profile.pair_count()).map(|_| rng.gen()).collect());
    encrypt_deterministic(public, plaintext, &filler, &r)
}

/// Decrypts, or fails with [`Error::NotACiphertext`] once `|k|` passes `3ñ(ñ+1)/2`.
pub fn decrypt(private: &PrivateKey, c: &Ciphertext) -> Result<BitString> {
    decrypt_detailed(private, c).map(|d| d.plaintext)
}

/// Walks `k = 0, -2, +2, -4, +4, ...`, testing `G = Ḡ^(δ^-1) W^(-k)` at each step.
pub fn decrypt_detailed(private: &PrivateKey, c: &Ciphertext) -> Result<Decryption> {
    let profile = private.profile();
    let bound = profile.k_bound();
    let m = private.modulus().modulus();
    let not_ct = Error::NotACiphertext { bound };
    if c.0.is_zero() || &c.0 >= m {
        return Err(not_ct);
    }
    let z0 = c.0.modpow(private.delta_inv(), m);
    let w2 = private.w() * private.w() % m;
    let w2_inv = private.w_inv() * private.w_inv() % m;

    let mut steps = 1u64;
    if let Some(d) = try_candidate(private, &z0, 0, steps) {
        return Ok(d);
    }
    let (mut minus, mut plus) = (z0.clone(), z0);
    for half in 1..=(bound / 2) as i64 {
        minus = minus * &w2 % m;
        steps += 1;
        if let Some(d) = try_candidate(private, &minus, -2 * half, steps) {
            return Ok(d);
        }
        plus = plus * &w2_inv % m;
        steps += 1;
        if let Some(d) = try_candidate(private, &plus, 2 * half, steps) {
            return Ok(d);
        }
    }
    Err(not_ct)
}

fn try_candidate(private: &PrivateKey, g: &BigUint, k: i64, steps: u64) -> Option<Decryption> {
    if g.is_even() || g > private.product_bound() {
        return None;
    }
    let options = triple_options(private.sequence(), g)?;
    let profile = private.profile();
    let (padded, r) = decode_structure(&options, |pairs, r| accept(profile, &options, pairs, r))?;
    let n = profile.n;
    let stored = padded.slice(0..n);
    let plaintext = if padded.bits()[n] { stored.complement() } else { stored };
    Some(Decryption { plaintext, padded, r, k, steps })
}

/// For each triple: the `(pair value, multiplicity)` readings of `g`, empty
/// when no element divides. `None` if some triple has no consistent reading or
/// `g` has a factor outside the sequence.
fn triple_options(seq: &CoprimeSequence, g: &BigUint) -> Option<Vec<Vec<(u8, u32)>>> {
    let mut rest = g.clone();
    let mut all = Vec::with_capacity(seq.triple_count());
    for j in 0..seq.triple_count() {
        let t = seq.triple(j);
        let mut options = Vec::new();
        let mut consumed = None;
        for (k, &a) in t.iter().enumerate() {
            if rem_u64(&rest, a) != 0 {
                continue;
            }
            let (q, l) = strip(&rest, a);
            if t.iter().all(|&other| rem_u64(&q, other) != 0) {
                options.push((k as u8 + 1, l));
                consumed = Some(q);
            }
        }
        match consumed {
            Some(q) => rest = q,
            None if t.iter().any(|&a| rem_u64(&rest, a) == 0) => return None,
            None => {}
        }
        all.push(options);
    }
    rest.is_one().then_some(all)
}

fn strip(n: &BigUint, a: u64) -> (BigUint, u32) {
    let a = BigUint::from(a);
    let mut n = n.clone();
    let mut l = 0;
    loop {
        let (q, r) = n.div_rem(&a);
        if !r.is_zero() {
            return (n, l);
        }
        n = q;
        l += 1;
    }
}

/// Tiles the triples into shadow segments. Returns the first reading accepted
/// by `accept` as `(padded bits, r-string)`.
fn decode_structure<F>(options: &[Vec<(u8, u32)>], accept: F) -> Option<(BitString, BitString)>
where
    F: Fn(&[u8], &[bool]) -> bool,
{
    let m = options.len();
    let anchor = options.iter().position(|o| !o.is_empty())?;
    let mut pairs = vec![0u8; m];
    let mut r = vec![false; m];
    for &(b, l) in &options[anchor] {
        let l = l as usize;
        if l < anchor + 1 {
            continue;
        }
        let trail = l - (anchor + 1);
        if trail > m - anchor - 1 {
            continue;
        }
        let end = m - trail;
        if options[end..].iter().any(|o| !o.is_empty()) {
            continue;
        }
        pairs.iter_mut().for_each(|p| *p = 0);
        r.iter_mut().for_each(|x| *x = false);
        pairs[anchor] = b;
        r[anchor] = true;
        if tile(options, anchor + 1, end, &mut pairs, &mut r, &accept) {
            let padded = BitPairString::new(pairs).ok()?.to_bits();
            return Some((padded, BitString::new(r)));
        }
    }
    None
}

fn tile<F>(options: &[Vec<(u8, u32)>], i: usize, end: usize, pairs: &mut [u8], r: &mut [bool], accept: &F) -> bool
where
    F: Fn(&[u8], &[bool]) -> bool,
{
    if i == end {
        return accept(pairs, r);
    }
    if options[i].is_empty() {
        let Some(j) = (i + 1..end).find(|&j| !options[j].is_empty()) else {
            return false;
        };
        for &(b, l) in &options[j] {
            if l as usize == j - i + 1 {
                pairs[j] = b;
                r[j] = true;
                if tile(options, j + 1, end, pairs, r, accept) {
                    return true;
                }
                pairs[j] = 0;
                r[j] = false;
            }
        }
        return false;
    }
    for &(b, l) in &options[i] {
        let p = i + l as usize - 1;
        if p >= end || options[i + 1..=p].iter().any(|o| !o.is_empty()) {
            continue;
        }
        pairs[p] = b;
        r[p] = l == 1;
        if tile(options, p + 1, end, pairs, r, accept) {
            return true;
        }
        pairs[p] = 0;
        r[p] = false;
    }
    false
}

/// Re-encodes a reading and checks it against the triple options, the 00-pair
/// limit, and the complement-flag rule.
fn accept(profile: &SchemeProfile, options: &[Vec<(u8, u32)>], pairs: &[u8], r: &[bool]) -> bool {
    let Ok(p) = BitPairString::new(pairs.to_vec()) else {
        return false;
    };
    if count_00(&p) > profile.ntilde() / 4 {
        return false;
    }
    let Ok(shadow) = pair_shadow(&p) else {
        return false;
    };
    let mut expected: Vec<Option<(u8, u32)>> = vec![None; options.len()];
    for (i, (&b, &s)) in pairs.iter().zip(&shadow.shadows).enumerate() {
        if b == 0 {
            continue;
        }
        if !r[i] && s as usize > i + 1 {
            return false;
        }
        let triple = item_index(i, b, s, r[i]) / 3;
        if expected[triple].replace((b, s)).is_some() {
            return false;
        }
    }
    let consistent = expected.iter().zip(options).all(|(e, o)| match e {
        Some(entry) => o.contains(entry),
        None => o.is_empty(),
    });
    if !consistent {
        return false;
    }

    let padded = p.to_bits();
    let n = profile.n;
    let stored = padded.slice(0..n);
    let Ok(stored_pairs) = pair_string(&stored) else {
        return false;
    };
    if count_00(&stored_pairs) > n / 4 {
        return false;
    }
    if padded.bits()[n] {
        let original = stored.complement();
        !original.is_zero() && pair_string(&original).map(|o| count_00(&o) > n / 4).unwrap_or(false)
    } else {
        !stored.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::mod_pow_i64;
    use crate::coprime::anomalous_product;
    use crate::keygen::{keygen, KeyPair};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::sync::OnceLock;

    fn toy_key() -> &'static KeyPair {
        static KEY: OnceLock<KeyPair> = OnceLock::new();
        KEY.get_or_init(|| keygen(&SchemeProfile::toy(), &mut ChaCha20Rng::seed_from_u64(7)).unwrap())
    }

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    /// Product of `A_idx^s` over the transcript, computed without the codec.
    fn product_from_transcript(seq: &CoprimeSequence, t: &EncryptionTranscript) -> BigUint {
        let mut g = BigUint::one();
        for (i, (&b, &s)) in t.pairs.pairs().iter().zip(&t.shadow.shadows).enumerate() {
            if b == 0 {
                continue;
            }
            let triple = if t.r.bits()[i] { i } else { i + 1 - s as usize };
            g *= BigUint::from(seq.triple(triple)[b as usize - 1]).pow(s);
        }
        g
    }

    #[test]
    fn unlevered_ciphertext_is_anomalous_product() {
        let kp = toy_key();
        let m = kp.private.modulus().modulus();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for value in 1..256u64 {
            let (c, t) = encrypt_with_transcript(&kp.public, &BitString::from_u64(value, 8), &mut rng).unwrap();
            let k = t.lever_sum(&kp.debug.levers);
            assert_eq!(k % 2, 0);
            assert!(k.unsigned_abs() <= SchemeProfile::toy().k_bound());
            let g = c.0.modpow(kp.private.delta_inv(), m) * mod_pow_i64(kp.private.w(), -k, m).unwrap() % m;
            assert_eq!(g, product_from_transcript(kp.private.sequence(), &t));
            assert!(&g <= kp.private.product_bound());
        }
    }

    #[test]
    fn all_ones_r_gives_anomalous_product() {
        let kp = toy_key();
        let m = kp.private.modulus().modulus();
        let plaintext = bits("10010110");
        let filler = bits("101");
        let r = bits("111111");
        let (c, t) = encrypt_deterministic(&kp.public, &plaintext, &filler, &r).unwrap();
        let k = t.lever_sum(&kp.debug.levers);
        let g = c.0.modpow(kp.private.delta_inv(), m) * mod_pow_i64(kp.private.w(), -k, m).unwrap() % m;
        assert_eq!(g, anomalous_product(kp.private.sequence(), &t.pairs).unwrap());
    }

    #[test]
    fn complement_rule_and_flag() {
        let kp = toy_key();
        let r = bits("000000");
        let (_, t) = encrypt_deterministic(&kp.public, &bits("00000011"), &bits("111"), &r).unwrap();
        assert!(t.inverted);
        assert_eq!(t.padded, bits("111111001111"));
        let (_, t) = encrypt_deterministic(&kp.public, &bits("01010011"), &bits("011"), &r).unwrap();
        assert!(!t.inverted);
        assert_eq!(t.padded, bits("010100110011"));
        assert!(t.r.bits()[t.shadow.anchor]);
    }

    #[test]
    fn deterministic_rejections() {
        let kp = toy_key();
        let r = bits("000000");
        assert_eq!(
            encrypt_deterministic(&kp.public, &bits("00000000"), &bits("111"), &r).unwrap_err(),
            Error::ZeroPlaintext
        );
        assert!(matches!(
            encrypt_deterministic(&kp.public, &bits("0101"), &bits("111"), &r),
            Err(Error::Length { .. })
        ));
        assert_eq!(
            encrypt_deterministic(&kp.public, &bits("01000011"), &bits("000"), &r).unwrap_err(),
            Error::TooManyZeroPairs { zero_pairs: 4, limit: 3 }
        );
    }

    #[test]
    fn toy_round_trip_every_plaintext_filler_and_r() {
        let kp = toy_key();
        let profile = SchemeProfile::toy();
        for value in 1..256u64 {
            let plaintext = BitString::from_u64(value, 8);
            for f in 0..8u64 {
                for rv in 0..64u64 {
                    let filler = BitString::from_u64(f, 3);
                    let r = BitString::from_u64(rv, 6);
                    let Ok((c, t)) = encrypt_deterministic(&kp.public, &plaintext, &filler, &r) else {
                        continue;
                    };
                    let d = decrypt_detailed(&kp.private, &c).unwrap();
                    assert_eq!(d.plaintext, plaintext);
                    assert_eq!(d.padded, t.padded);
                    assert_eq!(d.k, t.lever_sum(&kp.debug.levers));
                    assert!(d.steps <= profile.k_bound() + 1);
                }
            }
        }
    }

    #[test]
    fn random_values_are_rejected() {
        let kp = toy_key();
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        let m = kp.public.modulus();
        let mut rejected = 0;
        for _ in 0..50 {
            let v = rng.gen_range(2..m.iter_u64_digits().next().unwrap());
            if decrypt(&kp.private, &Ciphertext(BigUint::from(v))).is_err() {
                rejected += 1;
            }
        }
        assert!(rejected >= 45, "only {rejected} of 50 random values rejected");
        assert_eq!(
            decrypt(&kp.private, &Ciphertext(BigUint::zero())).unwrap_err(),
            Error::NotACiphertext { bound: 234 }
        );
        assert!(decrypt(&kp.private, &Ciphertext(m.clone())).is_err());
    }

    #[test]
    fn encryption_is_randomized() {
        let kp = toy_key();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let plaintext = bits("11001010");
        let cts: std::collections::HashSet<_> =
            (0..64).map(|_| encrypt(&kp.public, &plaintext, &mut rng).unwrap()).collect();
        assert!(cts.len() > 16);
    }
}
