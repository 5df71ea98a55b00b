use krieger_core::classifier::classify;
use krieger_core::cocycle::{
    agreement, brute_force_block, compose_witnesses, estimate_ratio_set, lattice_detect, log_cocycle,
    mc_sample_cocycle, witness_search, Block, EstimateParams, LatticeVerdict, SampleParams, Target, Witness,
    WitnessQuery, DEFAULT_LATTICE_TOL, DEFAULT_STATE_CAP,
};
use krieger_core::fixtures::{self, CorpusEntry};
use krieger_core::scheme::{Mode, ValidatedScheme};
use krieger_core::{BigRational, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn delta() -> BigRational {
    q(1, 8)
}

/// Witness existence from the search and from the oracle on the same block.
fn agree<S: Scalar>(spec: &ValidatedScheme, k: usize, target: &BigRational, eps: &BigRational) -> (bool, bool) {
    let (target, eps, delta) = (S::from_rational(target), S::from_rational(eps), S::from_rational(&delta()));
    let query = WitnessQuery {
        target: Target::Value(target.clone()),
        eps: eps.clone(),
        start: 0,
        k_max: k,
        delta: delta.clone(),
        state_cap: DEFAULT_STATE_CAP,
    };
    let report = witness_search(spec, &query).unwrap();
    if let Some(w) = &report.witness {
        assert!(w.replays(spec));
        let oracle = brute_force_block(&w.block, std::slice::from_ref(&target)).unwrap();
        assert!(w.distance() <= oracle[0].distance, "search missed the closest pair on its block");
    }
    let block = Block::new(spec, 0, k, &delta).unwrap();
    let oracle = brute_force_block(&block, &[target]).unwrap();
    (report.witness.is_some(), oracle[0].distance < eps)
}

fn check(entry: &CorpusEntry, k: usize, target: &BigRational, eps: &BigRational) -> (bool, bool) {
    match entry.scheme.mode() {
        Mode::Exact => agree::<BigRational>(&entry.scheme, k, target, eps),
        Mode::Float => agree::<f64>(&entry.scheme, k, target, eps),
    }
}

#[test]
fn corpus_is_large_enough() {
    assert!(fixtures::oracle_corpus().len() >= 20);
}

#[test]
fn search_matches_oracle_on_powers() {
    for entry in fixtures::oracle_corpus() {
        for k in 1..=4 {
            for power in 1..=3 {
                let target = Pow::pow(&entry.ratio, power);
                for eps in [q(1, 100), q(1, 10_000)] {
                    if eps >= target {
                        continue;
                    }
                    let (found, exists) = check(&entry, k, &target, &eps);
                    assert_eq!(found, exists, "{} K={k} target={target} eps={eps}", entry.name);
                }
            }
        }
    }
}

#[test]
fn geometric_reaches_every_power_of_two() {
    let spec = fixtures::geometric(q(1, 2));
    let block = Block::new(&spec, 0, 1, &q(1, 10_000_000)).unwrap();
    let targets: Vec<BigRational> = (1..=20).map(|k| Pow::pow(&q(1, 2), k)).collect();
    for hit in brute_force_block(&block, &targets).unwrap() {
        assert!(hit.distance.is_zero(), "{}", hit.target);
    }
}

#[test]
fn powers_samples_are_exact_powers_of_two() {
    let spec = fixtures::two_thirds();
    let params = SampleParams { seed: 11, samples: 2000, start: 0, window: 20, delta: delta() };
    let set = mc_sample_cocycle(&spec, &params).unwrap();
    for s in &set.samples {
        let (n, d) = (s.d.numer(), s.d.denom());
        let power_of_two = |v: &BigInt| v.is_positive() && (v & (v - BigInt::one())).is_zero();
        assert!(power_of_two(n) && power_of_two(d), "{}", s.d);
    }
    let LatticeVerdict::Lattice { period } = lattice_detect(&set.log_values(), DEFAULT_LATTICE_TOL).unwrap() else {
        panic!("expected a lattice")
    };
    assert!((period - std::f64::consts::LN_2).abs() < 1e-9);
}

/// Writes `v = 2^a 3^b`, or `None` if another prime divides it.
fn two_three(v: &BigInt) -> Option<(i64, i64)> {
    let mut v = v.clone();
    let mut exps = (0, 0);
    for (p, e) in [(2u32, &mut exps.0), (3u32, &mut exps.1)] {
        while (&v % p).is_zero() {
            v /= p;
            *e += 1;
        }
    }
    v.is_one().then_some(exps)
}

#[test]
fn interleaved_samples_decompose() {
    let spec = fixtures::interleaved(q(1, 2), q(1, 3));
    let params = SampleParams { seed: 5, samples: 10_000, start: 0, window: 20, delta: delta() };
    let set = mc_sample_cocycle(&spec, &params).unwrap();
    let mut mixed = 0;
    for s in &set.samples {
        let (na, nb) = two_three(s.d.numer()).expect("numerator is 2^a 3^b");
        let (da, db) = two_three(s.d.denom()).expect("denominator is 2^a 3^b");
        let (m, n) = (na - da, nb - db);
        assert!(m.abs() <= 10 && n.abs() <= 10);
        let recomposed = m as f64 * std::f64::consts::LN_2 + n as f64 * 3f64.ln();
        assert!((recomposed - s.log_d).abs() < 1e-12);
        if m != 0 && n != 0 {
            mixed += 1;
        }
    }
    assert!(mixed >= 2);
    assert_eq!(lattice_detect(&set.log_values(), DEFAULT_LATTICE_TOL).unwrap(), LatticeVerdict::NoLattice);
}

#[test]
fn canonical_reports_agree() {
    for (name, spec, _) in fixtures::canonical() {
        let params = EstimateParams { samples: 2000, ..EstimateParams::default() };
        let empirical = match spec.mode() {
            Mode::Exact => estimate_ratio_set::<BigRational>(&spec, &params),
            Mode::Float => estimate_ratio_set::<f64>(&spec, &params),
        }
        .unwrap();
        let analytic = classify(&spec).label;
        assert_eq!(agreement(&analytic, &empirical.label), Some(true), "{name}: {analytic} vs {}", empirical.label);
    }
}

#[test]
fn geometric_law_disagrees_with_the_analytic_rule() {
    // every ratio is a power of 2, so the samples form a lattice even though
    // inf liminf M_i = 0 gives III_1 analytically
    let spec = fixtures::geometric(q(1, 2));
    let params = EstimateParams { samples: 2000, delta: 1e-6, ..EstimateParams::default() };
    let empirical = estimate_ratio_set::<BigRational>(&spec, &params).unwrap();
    assert_eq!(agreement(&classify(&spec).label, &empirical.label), Some(false));
}

fn words(len: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (prop::collection::vec(0usize..3, len), prop::collection::vec(0usize..3, len))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn corpus_search_matches_oracle(
        index in 0usize..22,
        k in 1usize..=6,
        num in 1i64..200,
        den in 1i64..100,
        fine in any::<bool>(),
    ) {
        let corpus = fixtures::oracle_corpus();
        let entry = &corpus[index % corpus.len()];
        let words = Block::new(&entry.scheme, 0, k, &delta()).unwrap().word_count();
        prop_assume!(words <= 100_000);
        let target = q(num, den);
        let eps = if fine { q(1, 10_000) } else { q(1, 100) };
        prop_assume!(eps < target);
        let (found, exists) = check(entry, k, &target, &eps);
        prop_assert_eq!(found, exists);
    }

    #[test]
    fn cocycle_is_antisymmetric_and_additive((x, y) in words(6), split in 1usize..6) {
        let spec = fixtures::geometric(q(1, 3));
        let block = Block::new(&spec, 0, 6, &q(1, 20)).unwrap();
        let forward = log_cocycle(&block, &x, &y).unwrap();
        let backward = log_cocycle(&block, &y, &x).unwrap();
        prop_assert_eq!(forward.d.clone() * backward.d, q(1, 1));
        prop_assert!((forward.log_d + backward.log_d).abs() < 1e-12);
        let head = Block::new(&spec, 0, split, &q(1, 20)).unwrap();
        let tail = Block::new(&spec, split, 6 - split, &q(1, 20)).unwrap();
        let a = log_cocycle(&head, &x[..split], &y[..split]).unwrap();
        let b = log_cocycle(&tail, &x[split..], &y[split..]).unwrap();
        prop_assert_eq!(a.d * b.d, forward.d);
    }

    #[test]
    fn composed_error_bound_holds(
        (x1, y1) in words(3),
        (x2, y2) in words(3),
        o1 in -999i64..1000,
        o2 in -999i64..1000,
        e1 in 1i64..50,
        e2 in 1i64..50,
    ) {
        let spec = fixtures::geometric(q(1, 3));
        let b1 = Block::new(&spec, 0, 3, &q(1, 20)).unwrap();
        let b2 = Block::new(&spec, 3, 3, &q(1, 20)).unwrap();
        let (eps1, eps2) = (q(e1, 1000), q(e2, 1000));
        let d1 = log_cocycle(&b1, &x1, &y1).unwrap().d;
        let d2 = log_cocycle(&b2, &x2, &y2).unwrap().d;
        let r1 = d1 + eps1.clone() * q(o1, 1000);
        let r2 = d2 + eps2.clone() * q(o2, 1000);
        let w1 = Witness::new(b1, x1, y1, r1.clone(), eps1.clone()).unwrap();
        let w2 = Witness::new(b2, x2, y2, r2.clone(), eps2.clone()).unwrap();
        let w = compose_witnesses(&w1, &w2).unwrap();
        prop_assert_eq!(w.eps.clone(), eps1.clone() * r2.abs() + eps2.clone() * r1.abs() + eps1 * eps2);
        prop_assert!((w.d.clone() - r1 * r2).abs() <= w.eps);
        prop_assert!(w.replays(&spec));
    }
}
