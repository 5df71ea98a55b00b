use krieger_core::asymptotics::{ClusterReport, Verdict};
use krieger_core::classifier::{
    classify, classify_iii_two_point, classify_iii_unbounded, decide, BranchEvidence, ClassifyError, GroupEvidence,
    GroupTag, TypeLabel, Warning,
};
use krieger_core::fixtures;
use krieger_core::group::Confidence;
use krieger_core::scheme::{validate, IndexClass, IndexSet, Mode, SchemeSpec, WeightTemplate};
use krieger_core::BigRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn canonical_labels() {
    for (name, spec, expected) in fixtures::canonical() {
        let v = classify(&spec);
        assert_eq!(v.label.to_string(), expected, "{name}");
        assert!(v.replays(), "{name}");
    }
}

#[test]
fn uniform_sum_is_zero() {
    let v = classify(&fixtures::uniform());
    let krieger_core::classifier::TypeII1Evidence::Tested { verdict } = &v.certificate.evidence.type_ii1 else {
        panic!("II_1 test should run on a finite alphabet");
    };
    assert_eq!(verdict.verdict, Verdict::Summable);
    assert_eq!(verdict.exact_sum, Some(q(0, 1)));
}

#[test]
fn summable_product_sum_is_one_half() {
    // Σ_{n>=1} 2^{-n-1} with ε_n = 2^{-n}, A = 2
    let v = classify(&fixtures::summable_product());
    assert_eq!(v.label, TypeLabel::IInfinite);
    assert_eq!(v.certificate.evidence.type_i.exact_sum, Some(q(1, 2)));
    assert_eq!(v.certificate.fired[0].id, "type-i-summable");
}

#[test]
fn two_thirds_verdicts() {
    let v = classify(&fixtures::two_thirds());
    let e = &v.certificate.evidence;
    assert_eq!(e.type_i.verdict, Verdict::Divergent);
    assert_eq!(e.type_iii.verdict, Verdict::Divergent);
    assert_eq!(v.label, TypeLabel::IIILambda(q(1, 2)));
    let ids: Vec<&str> = v.certificate.fired.iter().map(|f| f.id).collect();
    assert_eq!(
        ids,
        ["type-i-divergent", "type-ii1-divergent", "type-iii-divergent", "two-point-group-cyclic"]
    );
}

#[test]
fn lambda_zero_one_has_no_conflict() {
    let v = classify(&fixtures::lambda_zero_one());
    assert_eq!(v.label, TypeLabel::III0);
    assert!(v.certificate.warnings.is_empty());
    assert_eq!(v.certificate.mode, Mode::Float);
}

#[test]
fn geometric_weights_are_iii_one() {
    let spec = fixtures::geometric(q(1, 2));
    let v = classify_iii_unbounded(&spec).unwrap();
    assert_eq!(v.label, TypeLabel::III1);
    assert_eq!(v.certificate.fired.last().unwrap().id, "unbounded-zero-cluster");
    assert!(v.replays());
}

#[test]
fn branch_guards() {
    assert!(matches!(classify_iii_unbounded(&fixtures::two_thirds()), Err(ClassifyError::BranchError(_))));
    assert!(matches!(classify_iii_two_point(&fixtures::uniform()), Err(ClassifyError::BranchError(_))));
    assert!(classify_iii_two_point(&fixtures::two_thirds()).is_ok());
}

fn unbounded_evidence(kind: GroupTag, generator: Option<BigRational>) -> krieger_core::classifier::Evidence {
    let mut evidence = classify(&fixtures::geometric(q(1, 2))).certificate.evidence;
    let points = vec![q(1, 4), q(1, 2)];
    evidence.branch = Some(BranchEvidence::Unbounded {
        clusters: ClusterReport { points: Vec::new(), finite_values: Vec::new(), liminf: None, contains_zero: false },
        inf_liminf: q(1, 4),
        group: Some(GroupEvidence { points, kind, generator, confidence: Confidence::Exact, pairs: Vec::new() }),
    });
    evidence
}

#[test]
fn unbounded_group_decisions() {
    let cyclic = decide(&unbounded_evidence(GroupTag::Cyclic, Some(q(1, 2))));
    assert_eq!(cyclic.label, TypeLabel::IIILambda(q(1, 2)));
    assert_eq!(cyclic.fired.last().unwrap().id, "unbounded-group-cyclic");
    let trivial = decide(&unbounded_evidence(GroupTag::Trivial, None));
    assert_eq!(trivial.label, TypeLabel::III0);
    let dense = decide(&unbounded_evidence(GroupTag::Dense, None));
    assert_eq!(dense.label, TypeLabel::III1);
}

#[test]
fn two_point_trivial_group_is_flagged() {
    let mut evidence = classify(&fixtures::two_thirds()).certificate.evidence;
    let Some(BranchEvidence::TwoPoint { group: Some(group), .. }) = &mut evidence.branch else {
        panic!("two-point branch expected");
    };
    group.kind = GroupTag::Trivial;
    group.generator = None;
    let d = decide(&evidence);
    assert_eq!(d.label, TypeLabel::Inconclusive);
    assert_eq!(d.warnings, vec![Warning::TrivialGroupContradiction]);
}

#[test]
fn replay_detects_tampering() {
    let mut v = classify(&fixtures::powers(q(1, 3)));
    assert!(v.replays());
    v.label = TypeLabel::III1;
    assert!(!v.replays());
}

fn constant_scheme(weights: Vec<BigRational>) -> SchemeSpec {
    SchemeSpec {
        mode: Mode::Exact,
        prefix: Vec::new(),
        classes: vec![IndexClass { indices: IndexSet::all_from(1), template: WeightTemplate::ExplicitFinite(weights) }],
    }
}

fn law() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(1i64..6, 2..5).prop_map(|raw| {
        let total: i64 = raw.iter().sum();
        raw.into_iter().map(|r| q(r, total)).collect()
    })
}

/// `(λ, base, power)` with `λ = base^power`, for the grid {1/2, 1/3, 1/4, 2/3, 4/9}.
type GridPoint = ((i64, i64), (i64, i64), u32);

const GRID: [GridPoint; 5] =
    [((1, 2), (1, 2), 1), ((1, 3), (1, 3), 1), ((1, 4), (1, 2), 2), ((2, 3), (2, 3), 1), ((4, 9), (2, 3), 2)];

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn label_is_permutation_invariant(weights in law(), seed in any::<u64>()) {
        let mut shuffled = weights.clone();
        let len = shuffled.len();
        for i in (1..len).rev() {
            shuffled.swap(i, (seed as usize).wrapping_add(i * 7919) % (i + 1));
        }
        let a = classify(&validate(&constant_scheme(weights)).unwrap());
        let b = classify(&validate(&constant_scheme(shuffled)).unwrap());
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn label_is_prefix_invariant(weights in law(), first in prop::collection::vec(law(), 3), second in prop::collection::vec(law(), 3)) {
        let mut base = constant_scheme(weights);
        base.classes[0].indices = IndexSet::all_from(4);
        let a = classify(&validate(&base.with_prefix(first)).unwrap());
        let b = classify(&validate(&base.with_prefix(second)).unwrap());
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn label_survives_normalization(weights in law()) {
        let spec = constant_scheme(weights);
        let (normalized, _) = krieger_core::scheme::normalize(&spec).unwrap();
        let a = classify(&validate(&spec).unwrap());
        let b = classify(&normalized);
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn interleaved_powers_follow_the_product_rule(i in 0usize..5, j in 0usize..5) {
        let ((an, ad), (abn, abd), ae) = GRID[i];
        let ((bn, bd), (bbn, bbd), be) = GRID[j];
        let expected = if (abn, abd) == (bbn, bbd) {
            let base = q(abn, abd);
            let e = gcd(ae, be) as i32;
            TypeLabel::IIILambda(num_traits::Pow::pow(&base, e))
        } else {
            TypeLabel::III1
        };
        let v = classify(&fixtures::interleaved(q(an, ad), q(bn, bd)));
        prop_assert_eq!(v.label, expected);
    }
}
