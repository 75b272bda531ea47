//! Discrete logarithms modulo a word-sized prime by Pohlig-Hellman, with
//! baby-step giant-step inside each prime-order subgroup.

use std::collections::HashMap;

use crate::{Error, Result};

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `x` in `[0, order)` with `g^x = h (mod m)`, where `g` has the given prime
/// `order`.
pub fn bsgs(g: u64, h: u64, order: u64, m: u64) -> Option<u64> {
    let steps = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table = HashMap::with_capacity(steps as usize);
    let mut e = 1 % m;
    for j in 0..steps {
        table.entry(e).or_insert(j);
        e = mul_mod(e, g, m);
    }
    // g^(-steps) = g^(order - steps mod order)
    let giant = pow_mod(g, (order - steps % order) % order, m);
    let mut y = h % m;
    for i in 0..=steps {
        if let Some(&j) = table.get(&y) {
            let x = (i * steps + j) % order;
            return Some(x);
        }
        y = mul_mod(y, giant, m);
    }
    None
}

/// `x mod p^e` for `g^x = h`, where `N = p^e * rest` is the group order.
fn dlog_prime_power(g: u64, h: u64, p: u64, e: u32, n: u64, m: u64) -> Option<u64> {
    let pe = p.pow(e);
    let gi = pow_mod(g, n / pe, m);
    let hi = pow_mod(h, n / pe, m);
    let gamma = pow_mod(gi, pe / p, m);
    let gi_inv = pow_mod(gi, pe - 1, m);
    let mut x = 0u64;
    let mut pk = 1u64;
    for k in 0..e {
        let shifted = mul_mod(pow_mod(gi_inv, x, m), hi, m);
        let hk = pow_mod(shifted, pe / (pk * p), m);
        let d = bsgs(gamma, hk, p, m)?;
        x += d * pk;
        if k + 1 < e {
            pk *= p;
        }
    }
    Some(x % pe)
}

/// Chinese remaindering of `x = a_i (mod n_i)` for pairwise coprime `n_i`.
pub fn crt(residues: &[(u64, u64)]) -> (u64, u64) {
    residues.iter().fold((0u64, 1u64), |(x, n), &(a, ni)| {
        let n_big = n as u128 * ni as u128;
        // x + n * t = a (mod ni)  =>  t = (a - x) * n^-1 (mod ni)
        let inv = modinv_u64(n % ni, ni).expect("coprime moduli");
        let diff = (a as i128 - x as i128).rem_euclid(ni as i128) as u64;
        let t = mul_mod(diff, inv, ni);
        let combined = (x as u128 + n as u128 * t as u128) % n_big;
        (combined as u64, n_big as u64)
    })
}

fn modinv_u64(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// `x` in `[0, M-1)` with `g^x = h (mod M)` for a generator `g` of `Z_M^*`,
/// given the factorization of `M - 1`.
pub fn discrete_log(g: u64, h: u64, m: u64, factors: &[(u64, u32)]) -> Result<u64> {
    let n = m - 1;
    if h.is_multiple_of(m) {
        return Err(Error::Dlog("zero has no logarithm".into()));
    }
    let mut residues = Vec::with_capacity(factors.len());
    for &(p, e) in factors {
        let x = dlog_prime_power(g, h, p, e, n, m)
            .ok_or_else(|| Error::Dlog(format!("no solution in the subgroup of order {p}^{e}")))?;
        residues.push((x, p.pow(e)));
    }
    let (x, modulus) = crt(&residues);
    debug_assert_eq!(modulus, n);
    if pow_mod(g, x, m) != h % m {
        return Err(Error::Dlog(format!("{g} does not generate the group")));
    }
    Ok(x)
}

/// Smallest generator of `Z_M^*`.
pub fn smallest_generator(m: u64, factors: &[(u64, u32)]) -> Option<u64> {
    (2..m).find(|&g| factors.iter().all(|&(p, _)| pow_mod(g, (m - 1) / p, m) != 1))
}
