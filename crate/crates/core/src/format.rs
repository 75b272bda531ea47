//! Text encodings: key files, plaintexts, and ciphertexts.
//!
//! Key files are line oriented:
//!
//! ```text
//! JUNA-PUB v1                     JUNA-PRV v1
//! n=8 pad=4 tbar=48 pbar=101      n=8 pad=4 tbar=48 pbar=101
//! <M>                             <M>
//! <C_1> .. <C_{3ñ/2}>             <A_1> .. <A_{3ñ/2}>
//!                                 <W>
//!                                 <delta>
//! ```
//!
//! Numbers are lowercase hex without prefix or leading zeros, so parsing and
//! re-serializing a file reproduces it byte for byte.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::arith::ModulusRecord;
use crate::codec::Ciphertext;
use crate::coprime::CoprimeSequence;
use crate::keygen::{PrivateKey, PublicKey, SchemeProfile};
use crate::shadow::BitString;
use crate::{Error, Result};

pub const PUBLIC_MAGIC: &str = "JUNA-PUB v1";
pub const PRIVATE_MAGIC: &str = "JUNA-PRV v1";

fn header(p: &SchemeProfile) -> String {
    format!("n={} pad={} tbar={} pbar={}", p.n, p.pad, p.tbar, p.pbar)
}

pub fn public_key_to_string(key: &PublicKey) -> String {
    let mut out = format!("{PUBLIC_MAGIC}\n{}\n{:x}\n", header(key.profile()), key.modulus());
    for c in key.items() {
        out.push_str(&format!("{c:x}\n"));
    }
    out
}

pub fn private_key_to_string(key: &PrivateKey) -> String {
    let mut out = format!("{PRIVATE_MAGIC}\n{}\n{:x}\n", header(key.profile()), key.modulus().modulus());
    for a in key.sequence().elements() {
        out.push_str(&format!("{a:x}\n"));
    }
    out.push_str(&format!("{:x}\n{:x}\n", key.w(), key.delta()));
    out
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    next: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Result<Self> {
        let Some(body) = text.strip_suffix('\n') else {
            let line = text.split('\n').count();
            return Err(err(line, "file must end with a newline"));
        };
        Ok(Self { lines: body.split('\n').collect(), next: 0 })
    }

    fn take(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let line = self.next + 1;
        let s = self.lines.get(self.next).ok_or_else(|| err(line, format!("missing {what}")))?;
        self.next += 1;
        Ok((line, s))
    }

    fn hex(&mut self, what: &str) -> Result<BigUint> {
        let (line, s) = self.take(what)?;
        parse_canonical_hex(s).map_err(|m| err(line, format!("{what}: {m}")))
    }

    fn finish(&self) -> Result<()> {
        if self.next < self.lines.len() {
            return Err(err(self.next + 1, "unexpected trailing line"));
        }
        Ok(())
    }
}

fn parse_canonical_hex(s: &str) -> std::result::Result<BigUint, String> {
    if s.is_empty() {
        return Err("empty value".into());
    }
    if !s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        return Err(format!("{s:?} is not lowercase hex"));
    }
    if s.len() > 1 && s.starts_with('0') {
        return Err(format!("{s:?} has leading zeros"));
    }
    BigUint::parse_bytes(s.as_bytes(), 16).ok_or_else(|| format!("{s:?} is not hex"))
}

fn parse_header(line: usize, s: &str) -> Result<SchemeProfile> {
    let fields: Vec<&str> = s.split(' ').collect();
    let keys = ["n", "pad", "tbar", "pbar"];
    if fields.len() != keys.len() {
        return Err(err(line, "expected `n=.. pad=.. tbar=.. pbar=..`"));
    }
    let mut values = [0u64; 4];
    for ((field, key), value) in fields.iter().zip(keys).zip(values.iter_mut()) {
        let v = field
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| err(line, format!("expected field `{key}=`")))?;
        if v.is_empty() || (v.len() > 1 && v.starts_with('0')) || !v.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(line, format!("{key} must be a decimal number")));
        }
        *value = v.parse().map_err(|_| err(line, format!("{key} out of range")))?;
    }
    SchemeProfile::from_header(values[0] as usize, values[1] as usize, values[2], values[3])
        .map_err(|e| err(line, e.to_string()))
}

fn parse_prelude<'a>(text: &'a str, magic: &str) -> Result<(Lines<'a>, SchemeProfile, BigUint)> {
    let mut lines = Lines::new(text)?;
    let (line, first) = lines.take("magic")?;
    if first != magic {
        return Err(err(line, format!("expected `{magic}`")));
    }
    let (line, h) = lines.take("profile line")?;
    let profile = parse_header(line, h)?;
    let m = lines.hex("modulus")?;
    if m.bits() != profile.tbar {
        return Err(err(3, format!("modulus has {} bits, profile says {}", m.bits(), profile.tbar)));
    }
    Ok((lines, profile, m))
}

pub fn parse_public_key(text: &str) -> Result<PublicKey> {
    let (mut lines, profile, m) = parse_prelude(text, PUBLIC_MAGIC)?;
    let items = (0..profile.item_count())
        .map(|i| lines.hex(&format!("C_{}", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    lines.finish()?;
    PublicKey::new(profile, items, m).map_err(|e| err(4, e.to_string()))
}

pub fn parse_private_key(text: &str) -> Result<PrivateKey> {
    let (mut lines, profile, m) = parse_prelude(text, PRIVATE_MAGIC)?;
    let first = lines.next + 1;
    let elements = (0..profile.item_count())
        .map(|i| {
            let name = format!("A_{}", i + 1);
            let line = lines.next + 1;
            lines.hex(&name)?.to_u64().ok_or_else(|| err(line, format!("{name} exceeds 64 bits")))
        })
        .collect::<Result<Vec<_>>>()?;
    let w_line = lines.next + 1;
    let w = lines.hex("W")?;
    let delta = lines.hex("delta")?;
    lines.finish()?;
    let sequence = CoprimeSequence::new(elements).map_err(|e| err(first, e.to_string()))?;
    let modulus = if m.bits() <= 64 {
        ModulusRecord::recover(&m).map_err(|e| err(3, e.to_string()))?
    } else {
        ModulusRecord::without_factorization(m)
    };
    PrivateKey::new(profile, sequence, w, delta, modulus).map_err(|e| err(w_line, e.to_string()))
}

/// Parses a plaintext of `n` bits: `0b` + `n` binary digits, `0x` + `n/4` hex
/// digits, or either form unprefixed, told apart by length.
pub fn parse_plaintext(s: &str, n: usize) -> Result<BitString> {
    let s = s.trim();
    let bad = |msg: String| Error::InvalidElement(format!("plaintext {s:?}: {msg}"));
    let (digits, binary) = if let Some(b) = s.strip_prefix("0b") {
        (b, true)
    } else if let Some(h) = s.strip_prefix("0x") {
        (h, false)
    } else if s.len() == n {
        (s, true)
    } else if s.len() == n.div_ceil(4) {
        (s, false)
    } else {
        return Err(bad(format!("expected {n} binary or {} hex digits", n.div_ceil(4))));
    };
    if binary {
        if digits.len() != n {
            return Err(bad(format!("expected {n} binary digits")));
        }
        digits.parse::<BitString>().map_err(|_| bad("not binary".into()))
    } else {
        if digits.len() != n.div_ceil(4) {
            return Err(bad(format!("expected {} hex digits", n.div_ceil(4))));
        }
        let mut bits = Vec::with_capacity(4 * digits.len());
        for c in digits.chars() {
            let v = c.to_digit(16).ok_or_else(|| bad(format!("{c:?} is not a hex digit")))?;
            bits.extend((0..4).rev().map(|i| (v >> i) & 1 == 1));
        }
        if bits.len() != n {
            let extra = bits.len() - n;
            if bits[..extra].iter().any(|&b| b) {
                return Err(bad(format!("value exceeds {n} bits")));
            }
            bits.drain(..extra);
        }
        Ok(BitString::new(bits))
    }
}

/// Lowercase hex, `⌈len/4⌉` digits.
pub fn plaintext_to_hex(b: &BitString) -> String {
    let pad = (4 - b.len() % 4) % 4;
    let bits: Vec<bool> = std::iter::repeat_n(false, pad).chain(b.bits().iter().copied()).collect();
    bits.chunks(4)
        .map(|c| {
            let v = c.iter().fold(0u32, |acc, &x| (acc << 1) | x as u32);
            char::from_digit(v, 16).expect("nibble")
        })
        .collect()
}

pub fn ciphertext_to_hex(c: &Ciphertext) -> String {
    format!("{:x}", c.value())
}

/// Parses a hex ciphertext; an optional `0x` prefix and surrounding
/// whitespace are accepted.
pub fn parse_ciphertext(s: &str) -> Result<Ciphertext> {
    let t = s.trim();
    let t = t.strip_prefix("0x").unwrap_or(t);
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::InvalidElement(format!("ciphertext {s:?} is not hex")));
    }
    Ok(Ciphertext(BigUint::parse_bytes(t.as_bytes(), 16).expect("validated hex")))
}
