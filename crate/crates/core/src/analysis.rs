//! Exhaustive enumeration over the unit group `E_k`.
//!
//! Machine-checks the worst-case iteration count of the JWA on Fibonacci
//! moduli, the inverse-placement lemma for square `k`, the size of
//! `U_k ∪ λ(U_k)` (with `λ(x) = 1/x mod k`) and the resulting lower bound
//! `p₁` on loop avoidance. Probabilities are exact rationals throughout.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{ceil_log_phi, fib, floor_log_phi, gcd_u64, mod_inv, totient, Modulus, Natural};
use crate::reduction::{classify, jwa_iterations, pares, RaceMode};

/// Largest `k` for which per-element maps over `E_k` are enumerated.
pub const ELEMENT_ENUMERATION_CAP: u64 = 1 << 16;

/// Largest `k` for which pairwise sweeps over `E_k × E_k` run exhaustively
/// by default.
pub const PAIR_SWEEP_CAP: u64 = 1 << 12;

/// Default number of pairs swept before switching to sampling:
/// `|E_{2^12}|² = 2048²`.
pub const DEFAULT_EXHAUSTIVE_LIMIT: u64 = 1 << 22;

pub const DEFAULT_SEED: u64 = 0x6b61_7279;

pub type Rational = Ratio<u64>;

fn require_square(m: &Modulus) -> Result<()> {
    if m.is_perfect_square() && m.k() >= 9 {
        Ok(())
    } else {
        Err(Error::NotSquare { k: m.k() })
    }
}

/// `E_k`: residues in `[1, k]` coprime to `k`, ascending.
pub fn enumerate_units(m: &Modulus) -> Vec<u64> {
    let k = m.k();
    (1..=k).filter(|&x| gcd_u64(x, k) == 1).collect()
}

/// `U_k ∩ E_k`, ascending. Only `O(√k)` candidates are visited.
pub fn units_in_u(m: &Modulus) -> Vec<u64> {
    let k = m.k();
    let r = m.isqrt();
    let low = 1..=r.min(k - 1);
    let high = (k - r.min(k - 1)).max(r + 1)..k;
    low.chain(high)
        .filter(|&x| classify(x, m).in_u() && gcd_u64(x, k) == 1)
        .collect()
}

/// Every `x ∈ E_k` with `1 < x < √k` whose inverse fails
/// `√k < 1/x mod k < k − √k`, as `(x, 1/x mod k)` pairs.
pub fn check_lemma2(m: &Modulus) -> Vec<(u64, u64)> {
    let k = m.k();
    (2..k)
        .take_while(|&x| m.below_sqrt(x))
        .filter(|&x| gcd_u64(x, k) == 1)
        .filter_map(|x| {
            let y = mod_inv(x, m).expect("x is a unit");
            let holds = m.above_sqrt(y) && m.above_sqrt(k - y);
            (!holds).then_some((x, y))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionStats {
    /// `U_k ∩ E_k`
    pub u_k: Vec<u64>,
    /// `λ(U_k)`, ascending.
    pub image: Vec<u64>,
    pub intersection: Vec<u64>,
    /// `U_k ∪ λ(U_k)`, ascending.
    pub union: Vec<u64>,
}

impl UnionStats {
    pub fn union_size(&self) -> u64 {
        self.union.len() as u64
    }
}

/// Enumerates `U_k`, `λ(U_k)`, their intersection and union for square `k`.
pub fn union_stats(m: &Modulus) -> Result<UnionStats> {
    require_square(m)?;
    let u_k = units_in_u(m);
    let mut image: Vec<u64> = u_k.iter().map(|&x| mod_inv(x, m).expect("x is a unit")).collect();
    image.sort_unstable();

    let intersection: Vec<u64> = u_k.iter().copied().filter(|x| image.binary_search(x).is_ok()).collect();
    let mut union: Vec<u64> = u_k.iter().chain(&image).copied().collect();
    union.sort_unstable();
    union.dedup();
    Ok(UnionStats {
        u_k,
        image,
        intersection,
        union,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1 {
    /// `(4φ(√k) − 2) / φ(k)`
    pub exact: Rational,
    /// `|U_k ∪ λ(U_k)| / |E_k|` by direct enumeration, when `k` is within
    /// [`ELEMENT_ENUMERATION_CAP`].
    pub enumerated: Option<Rational>,
    /// `1/2^{ℓ−2} − 1/2^{2ℓ−2}`, only for `k = 2^{2ℓ}`.
    pub closed_form: Option<Rational>,
}

/// Lower bound `p₁` on the probability that a uniformly drawn `x ∈ E_k`
/// has `x ∈ U_k` or `1/x mod k ∈ U_k`.
pub fn p1(m: &Modulus) -> Result<P1> {
    require_square(m)?;
    let root = m.isqrt();
    let exact = Rational::new(4 * totient(root) - 2, totient(m.k()));

    let enumerated = (m.k() <= ELEMENT_ENUMERATION_CAP).then(|| {
        let r = union_stats(m).expect("k is square").union_size();
        Rational::new(r, enumerate_units(m).len() as u64)
    });

    let closed_form = m.half_log2().map(|l| {
        // l >= 2 because k >= 9
        Rational::new(1, 1 << (l - 2)) - Rational::new(1, 1 << (2 * l - 2))
    });
    Ok(P1 {
        exact,
        enumerated,
        closed_form,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Avoidance {
    pub avoided: u64,
    pub total: u64,
    pub exhaustive: bool,
    pub seed: Option<u64>,
}

impl Avoidance {
    pub fn frequency(&self) -> Rational {
        Rational::new(self.avoided, self.total)
    }
}

/// Fraction of `(x, y) ∈ E_k × E_k` on which the lockstep racing residual
/// algorithm skips its loop. Runs exhaustively when `|E_k|²` is at most
/// `exhaustive_limit`, otherwise draws `exhaustive_limit` uniform pairs.
pub fn empirical_avoidance(m: &Modulus, exhaustive_limit: u64, seed: u64) -> Result<Avoidance> {
    require_square(m)?;
    if exhaustive_limit == 0 {
        return Err(Error::Precondition("exhaustive_limit must be positive"));
    }
    let units = enumerate_units(m);
    let count = units.len() as u64;
    let avoided_on = |x: u64, y: u64| -> u64 {
        let r = pares(x, y, m, RaceMode::Lockstep).expect("units satisfy the preconditions");
        u64::from(r.trace.loop_avoided)
    };

    if count.saturating_mul(count) <= exhaustive_limit {
        let avoided = units
            .iter()
            .flat_map(|&x| units.iter().map(move |&y| (x, y)))
            .map(|(x, y)| avoided_on(x, y))
            .sum();
        Ok(Avoidance {
            avoided,
            total: count * count,
            exhaustive: true,
            seed: None,
        })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let avoided = (0..exhaustive_limit)
            .map(|_| {
                let x = units[rng.gen_range(0..units.len())];
                let y = units[rng.gen_range(0..units.len())];
                avoided_on(x, y)
            })
            .sum();
        Ok(Avoidance {
            avoided,
            total: exhaustive_limit,
            exhaustive: false,
            seed: Some(seed),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstCase {
    pub max_iterations: u32,
    /// Smallest `c ∈ E_k` attaining the maximum.
    pub argmax_c: u64,
    /// How many `c ∈ E_k` attain the maximum.
    pub witnesses: u64,
    /// `⌊log_φ k⌋ / 2`
    pub predicted: u64,
}

pub fn predicted_worst_case(k: u64) -> u64 {
    floor_log_phi(&Natural::from(k)) / 2
}

/// Runs the JWA loop for every seed `c ∈ E_k` and reports the largest
/// iteration count.
pub fn worst_case_scan(m: &Modulus) -> Result<WorstCase> {
    let k = m.k();
    if k <= 2 {
        return Err(Error::Precondition("worst_case_scan requires k > 2"));
    }
    let mut best = 0u32;
    let mut argmax_c = 1u64;
    let mut witnesses = 0u64;
    for c in 1..k {
        let it = jwa_iterations(c, m);
        // coprimality is only worth checking for contenders
        if it < best || gcd_u64(c, k) != 1 {
            continue;
        }
        if it > best {
            best = it;
            argmax_c = c;
            witnesses = 1;
        } else {
            witnesses += 1;
        }
    }
    if witnesses == 0 {
        // c = 1 never enters the loop
        witnesses = 1;
    }
    Ok(WorstCase {
        max_iterations: best,
        argmax_c,
        witnesses,
        predicted: predicted_worst_case(k),
    })
}

/// `(F_{p+1}, F_p)`, the modulus and seed of the JWA worst case.
pub fn fib_worst_inputs(p: u64) -> Result<(Natural, Natural)> {
    if p < 3 {
        return Err(Error::Precondition("fib_worst_inputs requires p >= 3"));
    }
    Ok((fib(p + 1), fib(p)))
}

/// `(x, 1/x mod k)` for every `x ∈ E_k`.
pub fn inverse_table(m: &Modulus) -> Vec<(u64, u64)> {
    enumerate_units(m)
        .into_iter()
        .map(|x| (x, mod_inv(x, m).expect("x is a unit")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibLemmaReport {
    pub max_n: u64,
    /// `n` in `{0} ∪ [2, max_n]` with `⌈log_φ F_{n+1}⌉ ≠ n`.
    pub ceil_log_failures: Vec<u64>,
    /// `n` in `[3, max_n]` violating `F_{⌈n/2⌉}² < F_n < F_{⌈n/2⌉+1}²`.
    pub square_bracket_failures: Vec<u64>,
    /// `⌈log_φ F_2⌉`, which is 0 rather than 1.
    pub n1_value: u64,
}

impl FibLemmaReport {
    pub fn holds(&self) -> bool {
        self.ceil_log_failures.is_empty() && self.square_bracket_failures.is_empty()
    }
}

pub fn fibonacci_lemma(max_n: u64) -> FibLemmaReport {
    let ceil_log_failures = std::iter::once(0)
        .chain(2..=max_n)
        .filter(|&n| ceil_log_phi(&fib(n + 1)) != n)
        .collect();
    let square_bracket_failures = (3..=max_n)
        .filter(|&n| {
            let h = n.div_ceil(2);
            let (lo, hi, f) = (fib(h), fib(h + 1), fib(n));
            !(&lo * &lo < f && f < &hi * &hi)
        })
        .collect();
    FibLemmaReport {
        max_n,
        ceil_log_failures,
        square_bracket_failures,
        n1_value: ceil_log_phi(&fib(2)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub k: u64,
    pub size_ek: u64,
    pub size_uk: u64,
    pub size_union: u64,
    pub size_intersection: u64,
    pub r: u64,
    pub p1_exact: Rational,
    pub p1_enumerated: Option<Rational>,
    pub p1_closed_form: Option<Rational>,
    pub lemma2_violations: Vec<(u64, u64)>,
    pub empirical_avoidance: Option<Avoidance>,
}

/// Collects every square-modulus statistic in one report. The empirical
/// sweep runs only when `empirical` carries `(exhaustive_limit, seed)`.
pub fn analyze(m: &Modulus, empirical: Option<(u64, u64)>) -> Result<AnalysisReport> {
    require_square(m)?;
    let stats = union_stats(m)?;
    let p = p1(m)?;
    let empirical_avoidance = empirical
        .map(|(limit, seed)| empirical_avoidance(m, limit, seed))
        .transpose()?;
    Ok(AnalysisReport {
        k: m.k(),
        size_ek: totient(m.k()),
        size_uk: stats.u_k.len() as u64,
        size_union: stats.union_size(),
        size_intersection: stats.intersection.len() as u64,
        r: stats.union_size(),
        p1_exact: p.exact,
        p1_enumerated: p.enumerated,
        p1_closed_form: p.closed_form,
        lemma2_violations: check_lemma2(m),
        empirical_avoidance,
    })
}

/// Renders a rational as `num/den`, always with both parts.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering for display only.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        0.0
    } else {
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modulus(k: u64) -> Modulus {
        Modulus::new(k).unwrap()
    }

    #[test]
    fn units_examples() {
        assert_eq!(enumerate_units(&modulus(16)), vec![1, 3, 5, 7, 9, 11, 13, 15]);
        assert_eq!(enumerate_units(&modulus(4)), vec![1, 3]);
        assert_eq!(enumerate_units(&modulus(9)).len() as u64, totient(9));
    }

    #[test]
    fn units_in_u_matches_filter() {
        for k in [4u64, 9, 16, 17, 64, 100, 144, 1000, 1024] {
            let m = modulus(k);
            let brute: Vec<u64> = enumerate_units(&m)
                .into_iter()
                .filter(|&x| classify(x, &m).in_u())
                .collect();
            assert_eq!(units_in_u(&m), brute, "k = {k}");
        }
    }

    #[test]
    fn lemma2_examples() {
        assert!(check_lemma2(&modulus(16)).is_empty());
        assert!(check_lemma2(&modulus(17)).contains(&(4, 13)));
        assert_eq!(check_lemma2(&modulus(17)), vec![(4, 13)]);
        assert!(check_lemma2(&modulus(4096)).is_empty());
    }

    #[test]
    fn union_examples() {
        let s = union_stats(&modulus(64)).unwrap();
        assert_eq!(s.union, vec![1, 3, 5, 7, 9, 13, 21, 43, 51, 55, 57, 59, 61, 63]);
        assert_eq!(s.union_size(), 14);
        assert_eq!(s.intersection, vec![1, 63]);

        let s = union_stats(&modulus(16)).unwrap();
        assert_eq!(s.union_size(), 6);
        assert_eq!(s.intersection, vec![1, 15]);

        assert_eq!(union_stats(&modulus(17)), Err(Error::NotSquare { k: 17 }));
        assert_eq!(union_stats(&modulus(4)), Err(Error::NotSquare { k: 4 }));
    }

    #[test]
    fn p1_examples() {
        let p = p1(&modulus(16)).unwrap();
        assert_eq!(p.exact, Rational::new(3, 4));
        assert_eq!(p.enumerated, Some(Rational::new(6, 8)));
        assert_eq!(p.closed_form, Some(Rational::new(3, 4)));

        let p = p1(&modulus(64)).unwrap();
        assert_eq!(p.exact, Rational::new(7, 16));
        assert_eq!(p.enumerated, Some(Rational::new(14, 32)));

        let p = p1(&modulus(1 << 16)).unwrap();
        assert_eq!(p.exact, Rational::new((1 << 8) - 1, 1 << 14));
        assert_eq!(p.closed_form, Some(p.exact));

        let p = p1(&modulus(1 << 32)).unwrap();
        assert_eq!(p.exact, Rational::new((1 << 16) - 1, 1 << 30));
        assert_eq!(p.enumerated, None);

        // non power of four: no closed form
        let p = p1(&modulus(144)).unwrap();
        assert_eq!(p.closed_form, None);
        assert_eq!(p.exact, p.enumerated.unwrap());

        assert!(p1(&modulus(32)).is_err());
    }

    #[test]
    fn empirical_examples() {
        let a = empirical_avoidance(&modulus(64), DEFAULT_EXHAUSTIVE_LIMIT, DEFAULT_SEED).unwrap();
        assert!(a.exhaustive);
        assert_eq!(a.total, 32 * 32);
        assert!(a.frequency() >= Rational::new(7, 16));

        let a = empirical_avoidance(&modulus(16), DEFAULT_EXHAUSTIVE_LIMIT, DEFAULT_SEED).unwrap();
        assert!(a.frequency() >= Rational::new(3, 4));
    }

    #[test]
    fn avoidance_beyond_the_union() {
        // (3, 5) mod 64: c = 39 and s = 23 are both outside U_64, yet the
        // pair itself lies in U_64 × U_64.
        let m = modulus(64);
        let stats = union_stats(&m).unwrap();
        let c = crate::numerics::mod_div(3, 5, &m).unwrap();
        let s = crate::numerics::mod_div(5, 3, &m).unwrap();
        assert_eq!((c, s), (39, 23));
        assert!(!stats.union.contains(&c) && !classify(s, &m).in_u());
        assert!(pares(3, 5, &m, RaceMode::Lockstep).unwrap().trace.loop_avoided);
    }

    #[test]
    fn sampled_avoidance_is_reproducible() {
        let m = modulus(1 << 16);
        let a = empirical_avoidance(&m, 2000, 11).unwrap();
        let b = empirical_avoidance(&m, 2000, 11).unwrap();
        assert!(!a.exhaustive);
        assert_eq!(a, b);
        assert_eq!(a.total, 2000);
    }

    #[test]
    fn worst_case_examples() {
        let w = worst_case_scan(&modulus(144)).unwrap();
        assert_eq!((w.max_iterations, w.argmax_c, w.predicted), (5, 89, 5));

        // 21, 13, 8, 5, 3 against √21: three iterations
        let w = worst_case_scan(&modulus(21)).unwrap();
        assert_eq!((w.max_iterations, w.argmax_c, w.predicted), (3, 13, 3));

        let w = worst_case_scan(&modulus(256)).unwrap();
        assert!(u64::from(w.max_iterations) <= w.predicted);

        assert!(worst_case_scan(&modulus(2)).is_err());
    }

    #[test]
    fn worst_case_argmax_need_not_be_unique() {
        // k = F_20 = 6765 peaks at both F_19 = 4181 and 4196.
        let w = worst_case_scan(&modulus(6765)).unwrap();
        assert_eq!((w.max_iterations, w.argmax_c, w.witnesses), (9, 4181, 2));
        assert_eq!(jwa_iterations(4196, &modulus(6765)), 9);
    }

    #[test]
    fn fib_worst_inputs_examples() {
        assert_eq!(
            fib_worst_inputs(11).unwrap(),
            (Natural::from(144u32), Natural::from(89u32))
        );
        assert_eq!(
            fib_worst_inputs(7).unwrap(),
            (Natural::from(21u32), Natural::from(13u32))
        );
        assert_eq!(fib_worst_inputs(3).unwrap(), (Natural::from(3u32), Natural::from(2u32)));
        assert!(fib_worst_inputs(2).is_err());
    }

    #[test]
    fn inverse_table_examples() {
        assert_eq!(
            inverse_table(&modulus(16)),
            vec![(1, 1), (3, 11), (5, 13), (7, 7), (9, 9), (11, 3), (13, 5), (15, 15)]
        );
        assert_eq!(inverse_table(&modulus(4)), vec![(1, 1), (3, 3)]);
        let t = inverse_table(&modulus(64));
        for (x, inv) in [(3, 43), (5, 13), (7, 55)] {
            assert!(t.contains(&(x, inv)));
            assert_eq!(x * inv % 64, 1);
        }
    }

    #[test]
    fn fibonacci_lemma_holds_to_ninety() {
        let r = fibonacci_lemma(90);
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.n1_value, 0);
    }

    #[test]
    fn report_for_64() {
        let r = analyze(&modulus(64), Some((DEFAULT_EXHAUSTIVE_LIMIT, DEFAULT_SEED))).unwrap();
        assert_eq!(r.size_ek, 32);
        assert_eq!(r.size_uk, 8);
        assert_eq!(r.size_union, 14);
        assert_eq!(r.size_intersection, 2);
        assert_eq!(r.r, r.size_union);
        assert_eq!(r.p1_exact, Rational::new(r.r, r.size_ek));
        assert!(r.lemma2_violations.is_empty());
        assert!(r.empirical_avoidance.unwrap().frequency() >= r.p1_exact);
    }

    #[test]
    fn rational_rendering() {
        assert_eq!(format_rational(&Rational::new(14, 32)), "7/16");
        assert_eq!(format_rational(&Rational::new(4, 4)), "1/1");
        assert!((rational_to_f64(&Rational::new(255, 1 << 14)) - 0.01556).abs() < 1e-4);
    }
}
