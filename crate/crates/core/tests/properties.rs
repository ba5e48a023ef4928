//! Exhaustive and randomized properties of the reduction family and the
//! gcd driver.

use kary_core::analysis::enumerate_units;
use kary_core::gcd::{euclid_gcd, kary_gcd, kary_reduce_step};
use kary_core::numerics::gcd_u64;
use kary_core::reduction::{classify, jwa, pares, res, res_swapped, t_transform};
use kary_core::{Algorithm, Modulus, Natural, RaceMode};
use proptest::prelude::*;

fn modulus(k: u64) -> Modulus {
    Modulus::new(k).unwrap()
}

#[test]
fn all_entry_points_honor_the_contract() {
    for k in [16u64, 64, 144, 1024] {
        let m = modulus(k);
        let units = enumerate_units(&m);
        for &x in &units {
            for &y in &units {
                let outputs = [
                    ("jwa", jwa(x, y, &m).unwrap()),
                    ("res", res(x, y, &m).unwrap()),
                    ("res_swapped", res_swapped(x, y, &m).unwrap()),
                    ("pares", pares(x, y, &m, RaceMode::Lockstep).unwrap()),
                ];
                for (name, r) in outputs {
                    assert!(r.pair.d != 0, "{name} produced d = 0 on k={k} ({x},{y})");
                    assert!(
                        r.pair.satisfies_contract(x, y, &m),
                        "{name} k={k} ({x},{y}) -> {}",
                        r.pair
                    );
                }
            }
        }
    }
}

#[test]
fn t_transform_bounds_on_unit_pairs() {
    for k in [16u64, 64, 1024] {
        let m = modulus(k);
        let u: Vec<u64> = enumerate_units(&m)
            .into_iter()
            .filter(|&x| classify(x, &m).in_u())
            .collect();
        for &x in &u {
            for &y in &u {
                let p = t_transform(x, y, &m).unwrap();
                let (xp, yp) = (p.n as i128, p.d as i128);
                let ki = k as i128;
                assert!(xp > 0 && xp * xp < ki && yp != 0 && yp * yp < ki);
                assert_eq!((xp * y as i128).rem_euclid(ki), (x as i128 * yp).rem_euclid(ki));
            }
        }
    }
}

#[test]
fn racing_never_iterates_more_than_res() {
    for k in [16u64, 64, 144, 256, 1024] {
        let m = modulus(k);
        let units = enumerate_units(&m);
        for &x in &units {
            for &y in &units {
                let race = pares(x, y, &m, RaceMode::Lockstep).unwrap();
                let seq = res(x, y, &m).unwrap();
                assert!(race.trace.iterations <= seq.trace.iterations, "k={k} ({x},{y})");
            }
        }
    }
}

#[test]
fn race_modes_agree_on_the_contract() {
    let m = modulus(1024);
    let units = enumerate_units(&m);
    for &x in units.iter().step_by(5) {
        for &y in units.iter().step_by(7) {
            let a = pares(x, y, &m, RaceMode::Lockstep).unwrap();
            let b = pares(x, y, &m, RaceMode::Concurrent).unwrap();
            assert!(a.pair.satisfies_contract(x, y, &m));
            assert!(b.pair.satisfies_contract(x, y, &m));
        }
    }
}

#[test]
fn lockstep_is_deterministic() {
    let m = modulus(144);
    for x in enumerate_units(&m) {
        let a = pares(x, 5, &m, RaceMode::Lockstep).unwrap();
        let b = pares(x, 5, &m, RaceMode::Lockstep).unwrap();
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn contract_on_large_moduli(k in 3u64..(1 << 40), x in 1u64.., y in 1u64..) {
        let m = Modulus::new(k).unwrap();
        prop_assume!(gcd_u64(x % k, k) == 1 && gcd_u64(y % k, k) == 1);
        for r in [
            jwa(x, y, &m).unwrap(),
            res(x, y, &m).unwrap(),
            res_swapped(x, y, &m).unwrap(),
            pares(x, y, &m, RaceMode::Lockstep).unwrap(),
        ] {
            prop_assert!(r.pair.satisfies_contract(x, y, &m));
        }
    }

    #[test]
    fn product_shrinks_every_step(u in any::<u128>(), v in any::<u128>(), l in 2u32..16) {
        let m = Modulus::new(1u64 << (2 * l)).unwrap();
        let (u, v) = (Natural::from(u | 1), Natural::from(v | 1));
        let (u, v) = if u > v { (u, v) } else { (v, u) };
        prop_assume!(u != v);
        let step = kary_reduce_step(&u, &v, &m, Algorithm::Pares(RaceMode::Lockstep)).unwrap();
        prop_assert!(&step.u * &step.v < &u * &v);
        prop_assert!(&step.u * m.isqrt() < &u + &v);
    }

    #[test]
    fn gcd_matches_euclid_for_several_moduli(u in any::<u128>(), v in any::<u128>(), l in 2u32..16) {
        let m = Modulus::new(1u64 << (2 * l)).unwrap();
        let (u, v) = (Natural::from(u), Natural::from(v));
        prop_assume!(u != Natural::from(0u8) || v != Natural::from(0u8));
        let expected = euclid_gcd(&u, &v);
        for algo in [Algorithm::Jwa, Algorithm::Res, Algorithm::Pares(RaceMode::Lockstep)] {
            prop_assert_eq!(&kary_gcd(&u, &v, &m, algo).unwrap().result, &expected);
        }
    }
}
