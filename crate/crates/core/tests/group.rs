use std::collections::BTreeMap;

use krieger_core::group::{commensurable, log_index, mult_group, Confidence, GroupKind, DEFAULT_EXPONENT_BOUND};
use krieger_core::BigRational;
use num_traits::Pow;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Prime exponents of `n / d`, by trial division.
fn valuations(mut n: i64, mut d: i64) -> BTreeMap<i64, i64> {
    let mut out = BTreeMap::new();
    for p in 2..=97 {
        while n % p == 0 {
            n /= p;
            *out.entry(p).or_insert(0) += 1;
        }
        while d % p == 0 {
            d /= p;
            *out.entry(p).or_insert(0) -= 1;
        }
    }
    assert!(n == 1 && d == 1, "factor base too small");
    out
}

/// `a^q = b^p` for some positive `p, q` iff the valuation vectors are
/// proportional with a positive factor.
fn proportional(a: &BTreeMap<i64, i64>, b: &BTreeMap<i64, i64>) -> bool {
    let primes: Vec<&i64> = a.keys().chain(b.keys()).collect();
    let get = |m: &BTreeMap<i64, i64>, p: &i64| *m.get(p).unwrap_or(&0);
    primes.iter().all(|p| primes.iter().all(|r| get(a, p) * get(b, r) == get(a, r) * get(b, p)))
        && primes.iter().all(|p| get(a, p) * get(b, p) >= 0)
}

const INCOMMENSURABLE: [((i64, i64), (i64, i64)); 25] = [
    ((1, 2), (1, 3)),
    ((1, 2), (1, 5)),
    ((1, 3), (1, 5)),
    ((2, 3), (1, 2)),
    ((2, 3), (1, 3)),
    ((3, 5), (1, 2)),
    ((3, 5), (2, 3)),
    ((1, 6), (1, 2)),
    ((1, 6), (1, 3)),
    ((1, 10), (1, 5)),
    ((4, 9), (1, 2)),
    ((8, 27), (1, 3)),
    ((1, 7), (1, 2)),
    ((5, 7), (2, 3)),
    ((1, 4), (1, 9)),
    ((3, 4), (2, 3)),
    ((9, 10), (1, 2)),
    ((1, 12), (1, 18)),
    ((2, 5), (4, 5)),
    ((7, 11), (1, 11)),
    ((1, 8), (1, 27)),
    ((5, 6), (25, 36 * 2)),
    ((1, 100), (1, 1000 * 3)),
    ((2, 7), (3, 7)),
    ((13, 17), (1, 2)),
];

#[test]
fn hand_picked_pairs_are_dense() {
    for ((an, ad), (bn, bd)) in INCOMMENSURABLE {
        assert!(!proportional(&valuations(an, ad), &valuations(bn, bd)), "{an}/{ad}, {bn}/{bd}");
        let group = mult_group(&[q(an, ad), q(bn, bd)], DEFAULT_EXPONENT_BOUND).unwrap();
        assert_eq!(group.kind, GroupKind::Dense, "{an}/{ad}, {bn}/{bd}");
        assert_eq!(commensurable(&q(an, ad), &q(bn, bd), DEFAULT_EXPONENT_BOUND).unwrap(), None);
    }
}

#[test]
fn powers_generate_the_gcd_power() {
    for lambda in [q(1, 2), q(1, 3), q(2, 3), q(3, 5)] {
        for a in 1..=20u32 {
            for b in 1..=20u32 {
                let points = [Pow::pow(&lambda, a), Pow::pow(&lambda, b)];
                let group = mult_group(&points, DEFAULT_EXPONENT_BOUND).unwrap();
                let expected: BigRational = Pow::pow(&lambda, gcd(a, b));
                assert_eq!(group.kind, GroupKind::Cyclic(expected.clone()), "lambda={lambda} a={a} b={b}");
                assert_eq!(group.confidence, Confidence::Exact);
                for x in &points {
                    let k = log_index(x, &expected);
                    assert_eq!(Pow::pow(&expected, k as u32), *x);
                }
            }
        }
    }
}

#[test]
fn trivial_group_only_for_ones() {
    assert_eq!(mult_group(&[q(1, 1), q(1, 1)], DEFAULT_EXPONENT_BOUND).unwrap().kind, GroupKind::Trivial);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn float_mode_reproduces_inputs(a in 1i32..12, b in 1i32..12, denom in 2u32..9) {
        let lambda = 1.0 / denom as f64;
        let points = [lambda.powi(a), lambda.powi(b)];
        let group = mult_group(&points, DEFAULT_EXPONENT_BOUND).unwrap();
        let GroupKind::Cyclic(g) = group.kind else { panic!("expected cyclic") };
        for x in points {
            let k = log_index(&x, &g);
            prop_assert!((g.powi(k as i32) - x).abs() <= 1e-9);
        }
    }
}
