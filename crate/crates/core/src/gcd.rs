//! Right-shift k-ary GCD driver for `k = 2^{2ℓ}`.
//!
//! Each step maps `(u, v)` to `(|n·v − d·u| / k, v)` with `(n, d)` from one
//! of the reduction algorithms, then strips the factors of two that the
//! division leaves behind. The odd gcd of the inputs divides every
//! intermediate operand, but the converse fails: reductions can introduce
//! spurious odd factors, so the final candidate is cleaned up against the
//! original odd parts with Euclid.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{Modulus, Natural};
use crate::reduction::{Algorithm, ReductionTrace};

/// Classical remainder-loop gcd, used as the reference oracle.
pub fn euclid_gcd(u: &Natural, v: &Natural) -> Natural {
    let (mut a, mut b) = (u.clone(), v.clone());
    while !b.is_zero() {
        let r = &a % &b;
        a = std::mem::replace(&mut b, r);
    }
    a
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReduceStep {
    pub u: Natural,
    pub v: Natural,
    pub trace: ReductionTrace,
}

fn residue(x: &Natural, m: &Modulus) -> u64 {
    (x % m.k()).to_u64().expect("residue is below k, which fits in u64")
}

/// One k-ary reduction: `(u, v) ↦ (|n·v − d·u| / k, v)`.
///
/// Requires `u > v > 0` with both operands coprime to `k`.
pub fn kary_reduce_step(u: &Natural, v: &Natural, m: &Modulus, algo: Algorithm) -> Result<ReduceStep> {
    if v.is_zero() || u <= v {
        return Err(Error::Precondition("kary_reduce_step requires u > v > 0"));
    }
    let reduction = algo.reduce(residue(u, m), residue(v, m), m)?;
    let (n, d) = (reduction.pair.n, reduction.pair.d);

    let combo = BigInt::from(n) * BigInt::from(v.clone()) - BigInt::from(d) * BigInt::from(u.clone());
    let (q, r) = combo.div_rem(&BigInt::from(m.k()));
    if !r.is_zero() {
        return Err(Error::DivisibilityViolation { k: m.k() });
    }
    let up = q.into_parts().1;
    Ok(ReduceStep {
        u: up,
        v: v.clone(),
        trace: reduction.trace,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdReport {
    /// Number of k-ary reduction steps performed.
    pub steps: usize,
    pub reduction_traces: Vec<ReductionTrace>,
    /// `e` in the common factor `2^e`.
    pub two_exponent: u64,
    /// `candidate / odd gcd`, the spurious part discarded in cleanup.
    pub spurious_removed: Natural,
    pub result: Natural,
}

fn strip_twos(x: &Natural) -> (Natural, u64) {
    match x.trailing_zeros() {
        Some(tz) => (x >> tz, tz),
        None => (Natural::zero(), 0),
    }
}

/// Full k-ary GCD. `k` must be a power of four no smaller than 16.
///
/// Operands below `k²` are handed to Euclid directly.
pub fn kary_gcd(u: &Natural, v: &Natural, m: &Modulus, algo: Algorithm) -> Result<GcdReport> {
    if !m.is_power_of_four() || m.k() < 16 {
        return Err(Error::InvalidModulus {
            k: m.k().to_string(),
            reason: "the gcd driver needs k = 2^(2l) with l >= 2",
        });
    }
    if u.is_zero() && v.is_zero() {
        return Err(Error::Precondition("gcd(0, 0) is undefined"));
    }
    if u.is_zero() || v.is_zero() {
        let result = if u.is_zero() { v.clone() } else { u.clone() };
        return Ok(GcdReport {
            steps: 0,
            reduction_traces: Vec::new(),
            two_exponent: 0,
            spurious_removed: Natural::from(1u8),
            result,
        });
    }

    let (u_odd, tu) = strip_twos(u);
    let (v_odd, tv) = strip_twos(v);
    let two_exponent = tu.min(tv);

    let threshold = Natural::from(m.k()) * Natural::from(m.k());
    let mut traces = Vec::new();
    let (mut a, mut b) = if u_odd >= v_odd {
        (u_odd.clone(), v_odd.clone())
    } else {
        (v_odd.clone(), u_odd.clone())
    };

    let candidate = loop {
        if a == b {
            break a;
        }
        if a < threshold {
            break euclid_gcd(&a, &b);
        }
        let step = kary_reduce_step(&a, &b, m, algo)?;
        traces.push(step.trace);
        if step.u.is_zero() {
            break b;
        }
        let (up, _) = strip_twos(&step.u);
        (a, b) = if up >= b { (up, b) } else { (b, up) };
    };

    let g = euclid_gcd(&euclid_gcd(&candidate, &u_odd), &v_odd);
    let spurious_removed = &candidate / &g;
    Ok(GcdReport {
        steps: traces.len(),
        reduction_traces: traces,
        two_exponent,
        spurious_removed,
        result: g << two_exponent,
    })
}
