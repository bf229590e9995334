use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use posit_core::oracle::{oracle_mult, oracle_round, oracle_value};
use posit_core::*;
use proptest::prelude::*;

/// Largest `|fast_sigmoid(x) - sigmoid(x)|` over all finite `<8,0>` inputs.
const FAST_SIGMOID_MAX_ERROR_P8E0: f64 = 0.060664021611295804;

fn cfg(n: u32, es: u32) -> PositConfig {
    PositConfig::new(n, es).unwrap()
}

fn all(cfg: PositConfig) -> impl Iterator<Item = PositBits> {
    (0..1u64 << cfg.n()).map(move |b| PositBits::new(b, cfg).unwrap())
}

fn finite(cfg: PositConfig) -> impl Iterator<Item = PositBits> {
    all(cfg).filter(|p| !p.is_nar())
}

fn value(p: PositBits) -> BigRational {
    oracle_value(p).unwrap()
}

fn arb_config() -> impl Strategy<Value = PositConfig> {
    (3u32..=64)
        .prop_flat_map(|n| (Just(n), 0..=(n - 3).min(6)))
        .prop_map(|(n, es)| cfg(n, es))
}

fn arb_exact() -> impl Strategy<Value = ExactValue> {
    (any::<bool>(), 1u128..u128::MAX, -600i128..600)
        .prop_map(|(sign, sig, scale)| ExactValue::from_u128(sign, sig, scale))
}

fn arb_rational() -> impl Strategy<Value = BigRational> {
    (any::<i64>(), 1i64..i64::MAX, -200i32..200).prop_map(|(num, den, shift)| {
        let q = BigRational::new(num.into(), den.into());
        let two = BigRational::from_integer(2.into());
        if shift >= 0 {
            q * num_traits::pow(two, shift as usize)
        } else {
            q / num_traits::pow(two, (-shift) as usize)
        }
    })
}

fn posit_order(a: PositBits, b: PositBits) -> Ordering {
    a.compare(b).unwrap()
}

#[test]
fn pattern_order_matches_value_order() {
    for c in [cfg(8, 0), cfg(8, 1), cfg(8, 2)] {
        let values: Vec<_> = finite(c).map(|p| (p, value(p))).collect();
        for (a, va) in &values {
            for (b, vb) in &values {
                assert_eq!(
                    a.as_signed().cmp(&b.as_signed()),
                    va.cmp(vb),
                    "{a} vs {b} in {c}"
                );
            }
        }
    }
}

#[test]
fn negation_is_exact() {
    for c in [cfg(8, 0), cfg(8, 1), cfg(8, 2)] {
        for p in finite(c) {
            assert_eq!(to_exact(p.negate()), -to_exact(p), "{p}");
            assert_eq!(value(p.negate()), -value(p), "{p}");
        }
    }
}

#[test]
fn negation_distributes_over_addition() {
    for c in [cfg(8, 0), cfg(8, 1), cfg(8, 2)] {
        for a in all(c) {
            for b in all(c) {
                assert_eq!(
                    posit_add(a, b).negate(),
                    posit_add(a.negate(), b.negate()),
                    "{a} + {b}"
                );
                assert_eq!(posit_add(a, b), posit_add(b, a), "{a} + {b}");
            }
        }
    }
}

#[test]
fn multiplier_nar_dominates() {
    for c in [cfg(8, 0), cfg(8, 2), cfg(16, 1), cfg(32, 2)] {
        let nar = PositBits::nar(c);
        for p in [
            PositBits::zero(c),
            nar,
            PositBits::one(c),
            PositBits::maxpos(c),
            PositBits::minpos(c),
        ] {
            assert!(posit_mult(nar, p).is_nar());
            assert!(posit_mult(p, nar).is_nar());
        }
    }
}

#[test]
fn oracle_identity_and_exhaustive_round_trip() {
    for c in [cfg(8, 0), cfg(8, 1), cfg(8, 2), cfg(10, 3)] {
        for p in all(c) {
            assert_eq!(oracle_mult(p, PositBits::one(c)), p);
            if let Some(v) = oracle_value(p) {
                assert_eq!(oracle_round(&v, c), p);
            }
        }
    }
}

#[test]
fn fast_sigmoid_exhaustive_p8e0() {
    let c = cfg(8, 0);
    let half = BigRational::new(1.into(), 2.into());
    assert_eq!(value(fast_sigmoid(PositBits::zero(c)).unwrap()), half);

    let mut previous: Option<BigRational> = None;
    let mut max_error = 0f64;
    let mut inputs: Vec<_> = finite(c).collect();
    inputs.sort_by_key(|p| p.as_signed());
    for x in inputs {
        let s = fast_sigmoid(x).unwrap();
        let v = value(s);
        assert!(v >= BigRational::zero() && v <= BigRational::one(), "{x}");
        if let Some(prev) = &previous {
            assert!(*prev <= v, "not monotone at {x}");
        }
        previous = Some(v.clone());

        let mirrored = fast_sigmoid(x.negate()).unwrap();
        let smaller = if s.bits() <= mirrored.bits() {
            s
        } else {
            mirrored
        };
        let ulp = value(PositBits::new(smaller.bits() + 1, c).unwrap()) - value(smaller);
        let deviation = (v + value(mirrored) - BigRational::one()).abs();
        assert!(deviation <= ulp, "symmetry broken at {x}");

        let exact = 1.0 / (1.0 + (-to_f64(x)).exp());
        max_error = max_error.max((to_f64(s) - exact).abs());
    }
    assert_eq!(max_error, FAST_SIGMOID_MAX_ERROR_P8E0);
}

#[test]
fn exact_sigmoid_symmetric_within_one_ulp() {
    for c in [cfg(8, 0), cfg(8, 1), cfg(8, 2)] {
        for x in finite(c) {
            // Each output is within half its own ULP, so the bound is the coarser ULP.
            let (s, m) = (exact_sigmoid(x), exact_sigmoid(x.negate()));
            let larger = if s.bits() >= m.bits() { s } else { m };
            let ulp = value(larger) - value(PositBits::new(larger.bits() - 1, c).unwrap());
            let deviation = (value(s) + value(m) - BigRational::one()).abs();
            assert!(deviation <= ulp, "{x} in {c}");
        }
    }
}

fn quire_matches_exact(c: PositConfig, a: &[PositBits], b: &[PositBits]) {
    let exact = a.iter().zip(b).fold(ExactValue::zero(), |acc, (&x, &y)| {
        &acc + &(&to_exact(x) * &to_exact(y))
    });
    assert_eq!(dot(c, a, b, DotMode::Quire).unwrap(), encode(&exact, c));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn encode_is_monotone(c in arb_config(), u in arb_exact(), v in arb_exact()) {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        prop_assert_ne!(posit_order(encode(&lo, c), encode(&hi, c)), Ordering::Greater);
    }

    #[test]
    fn oracle_round_is_monotone(c in arb_config(), u in arb_rational(), v in arb_rational()) {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        prop_assert_ne!(posit_order(oracle_round(&lo, c), oracle_round(&hi, c)), Ordering::Greater);
    }

    #[test]
    fn encode_never_underflows_or_overflows(c in arb_config(), u in arb_exact()) {
        let p = encode(&u, c);
        prop_assert!(!p.is_zero());
        prop_assert!(!p.is_nar());
        prop_assert_eq!(p.sign_bit(), u < ExactValue::zero());
    }

    #[test]
    fn oracle_never_underflows_or_overflows(c in arb_config(), q in arb_rational()) {
        let p = oracle_round(&q, c);
        prop_assert!(!p.is_nar());
        prop_assert_eq!(p.is_zero(), q.is_zero());
    }

    #[test]
    fn encode_agrees_with_oracle(c in arb_config(), sig in 1u128..u128::MAX, scale in -300i128..300, sign in any::<bool>()) {
        let exact = ExactValue::from_u128(sign, sig, scale);
        let two = BigRational::from_integer(2.into());
        let mag = BigRational::from_integer(BigUint::from(sig).into());
        let shifted = if scale >= 0 {
            mag * num_traits::pow(two, scale as usize)
        } else {
            mag / num_traits::pow(two, (-scale) as usize)
        };
        let q = if sign { -shifted } else { shifted };
        prop_assert_eq!(encode(&exact, c), oracle_round(&q, c));
    }

    #[test]
    fn multiplier_sign_rule(c in arb_config(), a in any::<u64>(), b in any::<u64>()) {
        let (a, b) = (PositBits::from_bits_truncate(a, c), PositBits::from_bits_truncate(b, c));
        prop_assume!(!a.is_nar() && !b.is_nar() && !a.is_zero() && !b.is_zero());
        prop_assert_eq!(posit_mult(a, b).sign_bit(), a.sign_bit() ^ b.sign_bit());
    }

    #[test]
    fn quire_rounds_once(words in prop::collection::vec((any::<u16>(), any::<u16>()), 0..128)) {
        let c = cfg(16, 1);
        let (a, b): (Vec<_>, Vec<_>) = words
            .into_iter()
            .map(|(x, y)| (PositBits::from_bits_truncate(x as u64, c), PositBits::from_bits_truncate(y as u64, c)))
            .filter(|(x, y)| !x.is_nar() && !y.is_nar())
            .unzip();
        quire_matches_exact(c, &a, &b);
    }
}
