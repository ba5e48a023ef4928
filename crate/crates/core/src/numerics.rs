//! Exact integer kernels: extended Euclid, modular inverse and division,
//! Fibonacci numbers, Euler's totient, integer square roots and an exact
//! `⌊log_φ n⌋` that never touches floating point.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision natural number.
pub type Natural = BigUint;

/// The reduction modulus `k > 1` with its integer square root cached.
///
/// `k` is held in a machine word and limited to `i64::MAX` so that signed
/// cofactors bounded by `k` never overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    k: u64,
    isqrt: u64,
    is_square: bool,
    is_power_of_four: bool,
}

impl Modulus {
    pub fn new(k: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidModulus {
                k: k.to_string(),
                reason: "k must exceed 1",
            });
        }
        if k > i64::MAX as u64 {
            return Err(Error::InvalidModulus {
                k: k.to_string(),
                reason: "k must fit in a signed 64-bit word",
            });
        }
        let isqrt = isqrt_u64(k);
        let is_square = isqrt * isqrt == k;
        let is_power_of_four = k.is_power_of_two() && k.trailing_zeros().is_multiple_of(2);
        Ok(Modulus {
            k,
            isqrt,
            is_square,
            is_power_of_four,
        })
    }

    #[inline]
    pub fn k(&self) -> u64 {
        self.k
    }

    /// `⌊√k⌋`
    #[inline]
    pub fn isqrt(&self) -> u64 {
        self.isqrt
    }

    #[inline]
    pub fn is_perfect_square(&self) -> bool {
        self.is_square
    }

    #[inline]
    pub fn is_power_of_four(&self) -> bool {
        self.is_power_of_four
    }

    /// `ℓ` such that `k = 2^{2ℓ}`, if `k` is a power of four.
    pub fn half_log2(&self) -> Option<u32> {
        self.is_power_of_four.then(|| self.k.trailing_zeros() / 2)
    }

    /// `|x| < √k`, decided as `x² < k`.
    #[inline]
    pub fn below_sqrt(&self, x: u64) -> bool {
        (x as u128) * (x as u128) < self.k as u128
    }

    /// `|x| > √k`, decided as `x² > k`.
    #[inline]
    pub fn above_sqrt(&self, x: u64) -> bool {
        (x as u128) * (x as u128) > self.k as u128
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.k)
    }
}

/// `⌊√n⌋` for arbitrary-precision `n`.
pub fn isqrt(n: &Natural) -> Natural {
    n.sqrt()
}

/// `⌊√n⌋` for machine words.
pub fn isqrt_u64(n: u64) -> u64 {
    n.sqrt()
}

/// Extended Euclid: returns `(g, x, y)` with `g = gcd(a, b)` and
/// `a·x + b·y = g`.
pub fn ext_gcd(a: &Natural, b: &Natural) -> (Natural, BigInt, BigInt) {
    let (mut r0, mut r1) = (BigInt::from(a.clone()), BigInt::from(b.clone()));
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        r0 = std::mem::replace(&mut r1, r);
        let s = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s);
        let t = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t);
    }
    (r0.magnitude().clone(), s0, t0)
}

/// Word-sized extended Euclid with the same contract as [`ext_gcd`].
pub fn ext_gcd_u64(a: u64, b: u64) -> (u64, i128, i128) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 as u64, s0, t0)
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `1/x mod k`, normalized into `[1, k)`.
pub fn mod_inv(x: u64, m: &Modulus) -> Result<u64> {
    let k = m.k();
    let (g, s, _) = ext_gcd_u64(x % k, k);
    if g != 1 {
        return Err(Error::not_coprime(x, k));
    }
    Ok(s.rem_euclid(k as i128) as u64)
}

/// `a/b mod k`, i.e. the `c ∈ [0, k)` with `c·b ≡ a (mod k)`.
pub fn mod_div(a: u64, b: u64, m: &Modulus) -> Result<u64> {
    let k = m.k() as u128;
    let inv = mod_inv(b, m)? as u128;
    Ok(((a as u128 % k) * inv % k) as u64)
}

/// `(F_n, F_{n+1})` by fast doubling.
pub fn fib_pair(n: u64) -> (Natural, Natural) {
    if n == 0 {
        return (Natural::zero(), Natural::one());
    }
    let (a, b) = fib_pair(n / 2);
    // F_2m = F_m (2 F_{m+1} − F_m), F_{2m+1} = F_m² + F_{m+1}²
    let c = &a * (&b * 2u32 - &a);
    let d = &a * &a + &b * &b;
    if n.is_multiple_of(2) {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

/// The `n`-th Fibonacci number with `F_0 = 0`, `F_1 = 1`.
pub fn fib(n: u64) -> Natural {
    fib_pair(n).0
}

/// Decides `φ^m ≤ x` exactly, given `fm = F_m` and `fm1 = F_{m−1}`
/// (with `F_{−1} = 1`).
///
/// Uses `φ^m = F_m·φ + F_{m−1}`: the inequality becomes
/// `F_m·√5 ≤ 2x − 2F_{m−1} − F_m`.
fn phi_pow_le(fm: &Natural, fm1: &Natural, x: &Natural) -> bool {
    let lhs: BigInt = BigInt::from(x.clone()) * 2 - BigInt::from(fm1.clone()) * 2 - BigInt::from(fm.clone());
    if lhs.is_negative() {
        return false;
    }
    let rhs_sq = fm * fm * 5u32;
    rhs_sq <= lhs.magnitude() * lhs.magnitude()
}

/// The unique `m ≥ 0` with `φ^m ≤ n < φ^{m+1}`.
///
/// # Panics
///
/// Panics if `n` is zero.
pub fn floor_log_phi(n: &Natural) -> u64 {
    assert!(!n.is_zero(), "log_φ(0) is undefined");
    // (F_{m}, F_{m+1}) tracks φ^{m+1} = F_{m+1}·φ + F_m.
    let mut m = 0u64;
    let mut prev = Natural::zero();
    let mut cur = Natural::one();
    while phi_pow_le(&cur, &prev, n) {
        m += 1;
        let next = &prev + &cur;
        prev = std::mem::replace(&mut cur, next);
    }
    m
}

/// The least `m ≥ 0` with `n ≤ φ^m`.
///
/// `φ^m` is irrational for every `m ≥ 1`, so the only integer power of `φ`
/// is `φ^0 = 1`.
pub fn ceil_log_phi(n: &Natural) -> u64 {
    let f = floor_log_phi(n);
    if n.is_one() {
        f
    } else {
        f + 1
    }
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Euler's totient.
///
/// # Panics
///
/// Panics if `m` is zero.
pub fn totient(m: u64) -> u64 {
    assert!(m >= 1, "totient is defined for m >= 1");
    factorize(m).into_iter().fold(m, |acc, (p, _)| acc / p * (p - 1))
}
