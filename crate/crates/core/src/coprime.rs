//! Coprime sequences: generation, verification, and the subset products that
//! the trapdoor is built on.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::primes_below;
use crate::keygen::SchemeProfile;
use crate::shadow::{pair_shadow, BitPairString};
use crate::{Error, Result};

const SELECTION_ATTEMPTS: usize = 64;

/// Private sequence `A_1..A_{3m}`, read as `m` triples `(A_{3j-2}, A_{3j-1}, A_{3j})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimeSequence {
    elements: Vec<u64>,
}

impl CoprimeSequence {
    /// Wraps a sequence whose length is a multiple of three and which passes
    /// [`is_admissible`].
    pub fn new(elements: Vec<u64>) -> Result<Self> {
        if elements.is_empty() || !elements.len().is_multiple_of(3) {
            return Err(Error::Length { expected: 3 * (elements.len() / 3 + 1), actual: elements.len() });
        }
        if !is_admissible(&elements) {
            return Err(Error::InvalidElement("sequence is not a coprime sequence".into()));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn triple_count(&self) -> usize {
        self.elements.len() / 3
    }

    /// Triple `j` (0-based).
    pub fn triple(&self, j: usize) -> [u64; 3] {
        let t = &self.elements[3 * j..3 * j + 3];
        [t[0], t[1], t[2]]
    }

    /// `Ā_j`, the largest element of each triple.
    pub fn triple_maxima(&self) -> Vec<u64> {
        self.elements.chunks_exact(3).map(|t| *t.iter().max().expect("triple")).collect()
    }

    /// The element a nonzero pair value selects in triple `j` (0-based).
    pub fn select(&self, j: usize, pair: u8) -> u64 {
        debug_assert!((1..=3).contains(&pair));
        self.elements[3 * j + pair as usize - 1]
    }

    pub fn is_odd(&self) -> bool {
        self.elements.iter().all(|a| a % 2 == 1)
    }

    /// Whether triple `j` is a prime-power triple `(p^a, p^b, p^c)`.
    pub fn is_power_triple(&self, j: usize) -> bool {
        power_triple_base(&self.triple(j)).is_some()
    }
}

/// The definition check: whenever two elements share a factor `F != 1`,
/// neither cofactor divides any third element. Elements must be distinct.
pub fn is_coprime_sequence(seq: &[u64]) -> bool {
    if seq.contains(&0) {
        return false;
    }
    let n = seq.len();
    for i in 0..n {
        for j in i + 1..n {
            if seq[i] == seq[j] {
                return false;
            }
            let f = seq[i].gcd(&seq[j]);
            if f == 1 {
                continue;
            }
            let (ci, cj) = (seq[i] / f, seq[j] / f);
            if (0..n).any(|k| k != i && k != j && (seq[k].is_multiple_of(ci) || seq[k].is_multiple_of(cj))) {
                return false;
            }
        }
    }
    true
}

fn prime_power_base(x: u64) -> Option<(u64, u32)> {
    if x < 2 {
        return None;
    }
    let p = (2..=x).find(|d| x.is_multiple_of(*d))?;
    let mut rest = x;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Base prime of a triple of distinct powers of one prime.
fn power_triple_base(t: &[u64; 3]) -> Option<u64> {
    let parts: Vec<(u64, u32)> = t.iter().map(|&x| prime_power_base(x)).collect::<Option<_>>()?;
    let p = parts[0].0;
    let distinct = t[0] != t[1] && t[1] != t[2] && t[0] != t[2];
    (distinct && parts.iter().all(|&(q, _)| q == p)).then_some(p)
}

/// The definition check, relaxed so that a triple of distinct powers of one
/// prime may share that prime internally. Each such triple stands in for its
/// base prime when checked against the rest of the sequence; only one element
/// of a triple ever occurs in a product.
pub fn is_admissible(seq: &[u64]) -> bool {
    if is_coprime_sequence(seq) {
        return true;
    }
    if !seq.len().is_multiple_of(3) {
        return false;
    }
    let mut reduced = Vec::with_capacity(seq.len());
    let mut any_power = false;
    for t in seq.chunks_exact(3) {
        let t = [t[0], t[1], t[2]];
        match power_triple_base(&t) {
            Some(p) => {
                any_power = true;
                reduced.push(p);
            }
            None => reduced.extend_from_slice(&t),
        }
    }
    any_power && is_coprime_sequence(&reduced)
}

/// `Ā_{x1}^{ñ/4+1} * prod_{i=2}^{ñ/4} Ā_{xi}` over the triple maxima sorted
/// descending.
pub fn lower_bound_from_maxima(maxima: &[u64], ntilde: usize) -> BigUint {
    let mut sorted = maxima.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let quarter = ntilde / 4;
    assert!(quarter >= 1 && sorted.len() >= quarter, "need at least ntilde/4 triples");
    let mut bound = BigUint::from(sorted[0]).pow(quarter as u32 + 1);
    for &x in &sorted[1..quarter] {
        bound *= x;
    }
    bound
}

/// Lower bound on the modulus that keeps every admissible anomalous product
/// below `M`.
pub fn modulus_lower_bound(seq: &CoprimeSequence, ntilde: usize) -> BigUint {
    lower_bound_from_maxima(&seq.triple_maxima(), ntilde)
}

fn check_length(seq: &CoprimeSequence, p: &BitPairString) -> Result<()> {
    if p.len() != seq.triple_count() {
        return Err(Error::Length { expected: seq.triple_count(), actual: p.len() });
    }
    Ok(())
}

/// `G' = prod A_{3(i-1)+B_i}` over the non-00 pairs.
pub fn subset_product(seq: &CoprimeSequence, p: &BitPairString) -> Result<BigUint> {
    check_length(seq, p)?;
    Ok(p.pairs()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b != 0)
        .fold(BigUint::one(), |acc, (i, &b)| acc * seq.select(i, b)))
}

/// `G = prod A_{3(i-1)+B_i}^{𝓑_i}` with `𝓑` the pair shadows of `p`.
pub fn anomalous_product(seq: &CoprimeSequence, p: &BitPairString) -> Result<BigUint> {
    check_length(seq, p)?;
    let shadow = pair_shadow(p)?;
    Ok(p.pairs()
        .iter()
        .zip(&shadow.shadows)
        .enumerate()
        .filter(|(_, (&b, _))| b != 0)
        .fold(BigUint::one(), |acc, (i, (&b, &s))| acc * BigUint::from(seq.select(i, b)).pow(s)))
}

/// Number of prime-power triples needed to fill `count` slots from `bases`
/// distinct primes (each such triple spends one prime on three slots).
fn power_triples_needed(count: usize, bases: usize, relaxed: bool) -> usize {
    let deficit = count.saturating_sub(bases);
    let needed = deficit.div_ceil(2);
    if relaxed {
        needed.max(1)
    } else {
        needed
    }
}

/// Produces an odd coprime sequence of `3ñ/2` elements in `[3, P̄]`.
///
/// Elements are distinct odd primes or prime powers over distinct bases, so
/// the sequence is pairwise coprime. With `note2_relaxation` set, some triples
/// are `(p^3, p^2, p)` in shuffled order; enough of them are used to make up
/// any shortfall of primes below `P̄`. The chosen elements are grouped into
/// triples by magnitude so the modulus bound fits under `2^(tbar-1)`, then the
/// triple order and the order within each triple are shuffled.
pub fn gen_coprime_sequence<R: Rng + ?Sized>(profile: &SchemeProfile, rng: &mut R) -> Result<CoprimeSequence> {
    let count = 3 * profile.ntilde() / 2;
    let pbar = profile.pbar;
    let bases: Vec<u64> = primes_below(pbar + 1).into_iter().filter(|&p| p > 2).collect();

    let power_count = power_triples_needed(count, bases.len(), profile.note2_relaxation);
    if power_count > 0 && !profile.note2_relaxation {
        return Err(Error::PoolExhausted { needed: count, available: bases.len() });
    }
    let mut cube_bases: Vec<u64> = bases.iter().copied().filter(|&p| p.pow(3) <= pbar).collect();
    if cube_bases.len() < power_count || bases.len() < count - 2 * power_count {
        return Err(Error::PoolExhausted { needed: count, available: bases.len() + 2 * cube_bases.len() });
    }
    cube_bases.shuffle(rng);
    let power_bases = &cube_bases[..power_count];
    let rest: Vec<u64> = bases.iter().copied().filter(|p| !power_bases.contains(p)).collect();
    let single_count = count - 3 * power_count;
    if rest.len() < single_count {
        return Err(Error::PoolExhausted { needed: count, available: bases.len() });
    }

    let power_triples: Vec<[u64; 3]> = power_bases.iter().map(|&p| [p.pow(3), p.pow(2), p]).collect();
    let limit = BigUint::one() << (profile.tbar - 1);

    for attempt in 0..=SELECTION_ATTEMPTS {
        let mut chosen: Vec<u64> = if attempt < SELECTION_ATTEMPTS {
            let mut pool = rest.clone();
            pool.shuffle(rng);
            pool.truncate(single_count);
            pool.into_iter()
                .map(|p| {
                    let mut value = p;
                    while value * p <= pbar && rng.gen_bool(0.25) {
                        value *= p;
                    }
                    value
                })
                .collect()
        } else {
            rest[..single_count].to_vec()
        };
        chosen.sort_unstable_by(|a, b| b.cmp(a));
        let mut triples: Vec<[u64; 3]> =
            chosen.chunks_exact(3).map(|t| [t[0], t[1], t[2]]).collect();
        triples.extend(power_triples.iter().copied());

        let maxima: Vec<u64> = triples.iter().map(|t| t[0].max(t[1]).max(t[2])).collect();
        if lower_bound_from_maxima(&maxima, profile.ntilde()) >= limit {
            continue;
        }
        triples.shuffle(rng);
        for t in triples.iter_mut() {
            t.shuffle(rng);
        }
        let elements: Vec<u64> = triples.into_iter().flatten().collect();
        return CoprimeSequence::new(elements);
    }
    Err(Error::InvalidProfile(format!(
        "no coprime sequence below P̄ = {pbar} keeps the modulus bound under 2^{}",
        profile.tbar - 1
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shadow::count_00;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    fn example_seq() -> CoprimeSequence {
        CoprimeSequence::new(vec![13, 7, 23, 6, 11, 29, 17, 31, 37, 41, 19, 5]).unwrap()
    }

    fn pairs(v: &[u8]) -> BitPairString {
        BitPairString::new(v.to_vec()).unwrap()
    }

    #[test]
    fn definition_examples() {
        assert!(is_coprime_sequence(&[13, 2, 23, 11, 17, 19, 21, 15]));
        assert!(is_coprime_sequence(&[29, 7, 11, 23, 19, 13, 5, 17]));
        assert!(!is_coprime_sequence(&[4, 6, 9]));
        assert!(!is_coprime_sequence(&[3, 5, 3]));
    }

    #[test]
    fn power_triples_are_admissible_only_in_place() {
        assert!(!is_coprime_sequence(&[27, 9, 3, 5, 7, 11]));
        assert!(is_admissible(&[27, 9, 3, 5, 7, 11]));
        // Split across triples the shared prime breaks unique factorization.
        assert!(!is_admissible(&[27, 9, 5, 3, 7, 11]));
        // Another multiple of the base prime elsewhere is rejected.
        assert!(!is_admissible(&[27, 9, 3, 15, 7, 11]));
    }

    #[test]
    fn subset_products_of_the_worked_example() {
        let seq = example_seq();
        assert_eq!(subset_product(&seq, &pairs(&[3, 1, 2, 0])).unwrap(), BigUint::from(4278u32));
        assert_eq!(anomalous_product(&seq, &pairs(&[3, 1, 2, 0])).unwrap(), BigUint::from(98394u32));
        assert_eq!(subset_product(&seq, &pairs(&[0, 0, 0, 0])).unwrap(), BigUint::one());
        assert!(anomalous_product(&seq, &pairs(&[0, 0, 0, 0])).is_err());
        assert!(subset_product(&seq, &pairs(&[1])).is_err());
    }

    #[test]
    fn small_products() {
        let seq = CoprimeSequence::new(vec![3, 5, 7, 11, 13, 17]).unwrap();
        let single = CoprimeSequence::new(vec![3, 5, 7]).unwrap();
        assert_eq!(subset_product(&single, &pairs(&[1])).unwrap(), BigUint::from(3u32));
        // (0, 2): the second pair absorbs the leading zero run.
        assert_eq!(anomalous_product(&seq, &pairs(&[0, 2])).unwrap(), BigUint::from(13u32 * 13));
        // No 00-pairs: every shadow is 1.
        let p = pairs(&[1, 3]);
        assert_eq!(anomalous_product(&seq, &p).unwrap(), subset_product(&seq, &p).unwrap());
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_from_maxima(&[5, 3], 4), BigUint::from(25u32));
        assert_eq!(lower_bound_from_maxima(&[7, 5, 3, 2], 8), BigUint::from(1715u32));
        assert_eq!(lower_bound_from_maxima(&[2, 3, 5, 7], 8), BigUint::from(1715u32));
    }

    #[test]
    fn toy_generation_is_valid() {
        let profile = SchemeProfile { pbar: 101, ..SchemeProfile::toy() };
        for seed in 0..20 {
            let seq = gen_coprime_sequence(&profile, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(seq.len(), 18);
            assert!(is_coprime_sequence(seq.elements()));
            assert!(seq.is_odd());
            assert!(seq.elements().iter().all(|&a| (3..=101).contains(&a)));
        }
    }

    #[test]
    fn relaxed_generation_contains_a_power_triple() {
        let profile = SchemeProfile { note2_relaxation: true, ..SchemeProfile::toy() };
        let seq = gen_coprime_sequence(&profile, &mut ChaCha20Rng::seed_from_u64(4)).unwrap();
        assert!((0..seq.triple_count()).any(|j| seq.is_power_triple(j)));
        assert!(is_admissible(seq.elements()));
        assert!(seq.is_odd());
    }

    #[test]
    fn full_profile_sizes() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for (profile, len) in [
            (SchemeProfile::n80(), 144),
            (SchemeProfile::n96(), 168),
            (SchemeProfile::n112(), 192),
        ] {
            let seq = gen_coprime_sequence(&profile, &mut rng).unwrap();
            assert_eq!(seq.len(), len);
            assert!(is_admissible(seq.elements()));
            assert!(seq.elements().iter().all(|&a| a % 2 == 1 && a <= profile.pbar));
            assert!(modulus_lower_bound(&seq, profile.ntilde()).bits() < profile.tbar);
        }
    }

    #[test]
    fn undersized_pool_is_rejected() {
        let profile = SchemeProfile { pbar: 31, ..SchemeProfile::toy() };
        assert!(matches!(
            gen_coprime_sequence(&profile, &mut ChaCha20Rng::seed_from_u64(0)),
            Err(Error::PoolExhausted { .. })
        ));
    }

    /// Every nonzero pair string with at most ñ/4 00-pairs gives a distinct,
    /// odd anomalous product no larger than the modulus bound (equality is
    /// reachable, hence `M > bound` strictly).
    #[test]
    fn anomalous_products_are_injective_and_bounded() {
        let profile = SchemeProfile::toy();
        let ntilde = profile.ntilde();
        let seq = gen_coprime_sequence(&profile, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        let bound = modulus_lower_bound(&seq, ntilde);
        let m = ntilde / 2;
        let mut seen = HashSet::new();
        let mut max_product = BigUint::one();
        for code in 1..4u32.pow(m as u32) {
            let v: Vec<u8> = (0..m).rev().map(|i| ((code >> (2 * i)) & 3) as u8).collect();
            let p = pairs(&v);
            if count_00(&p) > ntilde / 4 {
                continue;
            }
            let g = anomalous_product(&seq, &p).unwrap();
            assert!(g.bit(0), "product must be odd");
            assert!(g <= bound);
            max_product = max_product.max(g.clone());
            assert!(seen.insert(g), "collision at {v:?}");
        }
        assert!(max_product <= bound);
    }
}
