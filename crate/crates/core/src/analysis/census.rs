//! Exhaustive encryption census for desk-scale keys.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;

use crate::codec::{decrypt_detailed, encrypt_deterministic};
use crate::exec::Execution;
use crate::keygen::{PrivateKey, PublicKey};
use crate::shadow::BitString;
use crate::{Error, Result};

/// Largest padded length the census will enumerate.
pub const MAX_CENSUS_NTILDE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub n: usize,
    pub ntilde: usize,
    /// Nonzero plaintexts enumerated.
    pub plaintexts: u64,
    /// `(plaintext, filler, r)` combinations encrypted, with the anchor bit of
    /// `r` fixed to 1.
    pub total: u64,
    pub distinct_ciphertexts: u64,
    /// Ciphertexts reachable from more than one plaintext, as
    /// `(ciphertext, plaintexts)`.
    pub collisions: Vec<(BigUint, Vec<u64>)>,
    /// Encryptions whose decryption failed or returned another plaintext.
    pub roundtrip_failures: u64,
    /// Largest number of `k` candidates any decryption examined.
    pub max_steps: u64,
}

impl CensusReport {
    pub const CSV_HEADER: &'static str =
        "n,ntilde,plaintexts,total,distinct_ciphertexts,collisions,roundtrip_failures,max_steps";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.ntilde,
            self.plaintexts,
            self.total,
            self.distinct_ciphertexts,
            self.collisions.len(),
            self.roundtrip_failures,
            self.max_steps
        )
    }
}

impl fmt::Display for CensusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} ntilde={}", self.n, self.ntilde)?;
        writeln!(f, "plaintexts={}", self.plaintexts)?;
        writeln!(f, "encryptions={}", self.total)?;
        writeln!(f, "distinct_ciphertexts={}", self.distinct_ciphertexts)?;
        writeln!(f, "collisions={}", self.collisions.len())?;
        for (c, ps) in &self.collisions {
            writeln!(f, "  {c:x}: {ps:?}")?;
        }
        writeln!(f, "roundtrip_failures={}", self.roundtrip_failures)?;
        write!(f, "max_steps={}", self.max_steps)
    }
}

struct PlaintextTally {
    ciphertexts: Vec<BigUint>,
    failures: u64,
    max_steps: u64,
}

fn tally_plaintext(public: &PublicKey, private: &PrivateKey, value: u64) -> PlaintextTally {
    let profile = public.profile();
    let pad_bits = profile.pad - 1;
    let pairs = profile.pair_count();
    let plaintext = BitString::from_u64(value, profile.n);
    let mut tally = PlaintextTally { ciphertexts: Vec::new(), failures: 0, max_steps: 0 };
    for f in 0..1u64 << pad_bits {
        let filler = BitString::from_u64(f, pad_bits);
        let mut anchor = None;
        for rv in 0..1u64 << pairs {
            let r = BitString::from_u64(rv, pairs);
            let Ok((c, t)) = encrypt_deterministic(public, &plaintext, &filler, &r) else {
                break;
            };
            let a = *anchor.get_or_insert(t.shadow.anchor);
            if !r.bits()[a] {
                continue;
            }
            match decrypt_detailed(private, &c) {
                Ok(d) if d.plaintext == plaintext => tally.max_steps = tally.max_steps.max(d.steps),
                _ => tally.failures += 1,
            }
            tally.ciphertexts.push(c.0);
        }
    }
    tally
}

/// Encrypts every nonzero plaintext under every admissible filler and every
/// r-string, decrypts each ciphertext, and groups ciphertexts by the
/// plaintexts that reach them.
pub fn uniqueness_census(public: &PublicKey, private: &PrivateKey, exec: Execution) -> Result<CensusReport> {
    let profile = public.profile();
    if profile.ntilde() > MAX_CENSUS_NTILDE || profile.n > 16 {
        return Err(Error::Unsupported(format!(
            "census enumerates 2^{} plaintexts; only desk-scale keys are supported",
            profile.n
        )));
    }
    if private.profile() != profile || private.modulus().modulus() != public.modulus() {
        return Err(Error::InvalidElement("public and private keys do not match".into()));
    }
    let values: Vec<u64> = (1..1u64 << profile.n).collect();
    let tallies = exec.map(&values, |&v| tally_plaintext(public, private, v));

    let mut owners: HashMap<BigUint, BTreeSet<u64>> = HashMap::new();
    let mut total = 0;
    let mut roundtrip_failures = 0;
    let mut max_steps = 0;
    for (&v, t) in values.iter().zip(tallies) {
        total += t.ciphertexts.len() as u64;
        roundtrip_failures += t.failures;
        max_steps = max_steps.max(t.max_steps);
        for c in t.ciphertexts {
            owners.entry(c).or_default().insert(v);
        }
    }
    let mut collisions: Vec<(BigUint, Vec<u64>)> = owners
        .iter()
        .filter(|(_, ps)| ps.len() > 1)
        .map(|(c, ps)| (c.clone(), ps.iter().copied().collect()))
        .collect();
    collisions.sort();
    Ok(CensusReport {
        n: profile.n,
        ntilde: profile.ntilde(),
        plaintexts: values.len() as u64,
        total,
        distinct_ciphertexts: owners.len() as u64,
        collisions,
        roundtrip_failures,
        max_steps,
    })
}

/// Number of `(filler, r)` combinations the census visits for `plaintext`.
pub fn admissible_combinations(public: &PublicKey, plaintext: &BitString) -> Result<u64> {
    let profile = public.profile();
    let pairs = profile.pair_count();
    let mut count = 0;
    for f in 0..1u64 << (profile.pad - 1) {
        let filler = BitString::from_u64(f, profile.pad - 1);
        match encrypt_deterministic(public, plaintext, &filler, &BitString::zeros(pairs)) {
            Ok(_) => count += 1u64 << (pairs - 1),
            Err(Error::TooManyZeroPairs { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(count)
}
