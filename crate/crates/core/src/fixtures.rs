//! Small named schemes used in tests, examples and the acceptance suite.

use num_rational::BigRational;
use num_traits::One;

use crate::scheme::{interleave, validate, Deviation, IndexClass, IndexSet, Mode, SchemeSpec, ValidatedScheme, WeightTemplate};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn constant(mode: Mode, template: WeightTemplate) -> SchemeSpec {
    SchemeSpec { mode, prefix: Vec::new(), classes: vec![IndexClass { indices: IndexSet::all_from(1), template }] }
}

fn checked(spec: SchemeSpec) -> ValidatedScheme {
    validate(&spec).expect("fixtures are valid")
}

/// `λ_n ≡ λ`: weights `(1/(1+λ), λ/(1+λ))` at every coordinate.
pub fn powers(lambda: BigRational) -> ValidatedScheme {
    checked(constant(Mode::Exact, WeightTemplate::two_point(lambda)))
}

/// `(1/2, 1/2)` at every coordinate.
pub fn uniform() -> ValidatedScheme {
    powers(BigRational::one())
}

/// `μ_n = (1 - 2^{-n-1}, 2^{-n-1})`.
pub fn summable_product() -> ValidatedScheme {
    checked(constant(
        Mode::Exact,
        WeightTemplate::PerturbedVector { limit: vec![q(1, 1), q(0, 1)], deviation: Deviation::Geometric { rho: q(1, 2) } },
    ))
}

/// Odd coordinates from `powers(a)`, even ones from `powers(b)`.
pub fn interleaved(a: BigRational, b: BigRational) -> ValidatedScheme {
    interleave(powers(a).spec(), powers(b).spec()).expect("fixtures are valid")
}

/// Even coordinates `λ_n = 1 - e^{-1/n}`, odd coordinates `λ_n = e^{-2^{-n}}`.
pub fn lambda_zero_one() -> ValidatedScheme {
    checked(SchemeSpec {
        mode: Mode::Float,
        prefix: Vec::new(),
        classes: vec![
            IndexClass {
                indices: IndexSet::Progression { start: 2, step: 2 },
                template: WeightTemplate::TwoPoint {
                    limit: q(0, 1),
                    deviation: Deviation::Power { exponent: q(1, 1) },
                    swapped: false,
                },
            },
            IndexClass {
                indices: IndexSet::Progression { start: 1, step: 2 },
                template: WeightTemplate::TwoPoint {
                    limit: q(1, 1),
                    deviation: Deviation::Geometric { rho: q(1, 2) },
                    swapped: false,
                },
            },
        ],
    })
}

/// Constant geometric weights `(1 - q) q^i` on an infinite alphabet.
pub fn geometric(ratio: BigRational) -> ValidatedScheme {
    let tail = BigRational::one() - &ratio;
    checked(constant(Mode::Exact, WeightTemplate::GeometricTail { head: Vec::new(), tail, ratio }))
}

/// `μ_n = (2/3, 1/3)`, i.e. `powers(1/2)`.
pub fn two_thirds() -> ValidatedScheme {
    powers(q(1, 2))
}

/// The five schemes with known types, with their expected labels.
pub fn canonical() -> Vec<(&'static str, ValidatedScheme, &'static str)> {
    vec![
        ("powers_half", powers(q(1, 2)), "III_lambda lambda=1/2"),
        ("uniform", uniform(), "II_1"),
        ("summable_product", summable_product(), "I_inf"),
        ("interleave_2_3", interleaved(q(1, 2), q(1, 3)), "III_1"),
        ("lambda_zero_one", lambda_zero_one(), "III_0"),
    ]
}

fn explicit(weights: &[(i64, i64)]) -> ValidatedScheme {
    checked(constant(Mode::Exact, WeightTemplate::ExplicitFinite(weights.iter().map(|&(n, d)| q(n, d)).collect())))
}

fn in_float(scheme: ValidatedScheme) -> ValidatedScheme {
    let mut spec = scheme.into_spec();
    spec.mode = Mode::Float;
    checked(spec)
}

/// A scheme in the oracle corpus, with a ratio whose powers are natural
/// search targets.
pub struct CorpusEntry {
    pub name: &'static str,
    pub scheme: ValidatedScheme,
    pub ratio: BigRational,
}

/// Schemes whose blocks have few distinct cocycle values, so exhaustive
/// enumeration stays cheap up to `10⁵` words.
pub fn oracle_corpus() -> Vec<CorpusEntry> {
    let entry = |name, scheme, ratio| CorpusEntry { name, scheme, ratio };
    let prefixed = {
        let mut spec = powers(q(1, 2)).into_spec();
        spec.classes[0].indices = IndexSet::all_from(4);
        checked(spec.with_prefix(vec![vec![q(3, 4), q(1, 4)], vec![q(1, 2), q(1, 2)], vec![q(5, 8), q(3, 8)]]))
    };
    let listed = checked(constant(
        Mode::Exact,
        WeightTemplate::PerturbedVector {
            limit: vec![q(2, 3), q(1, 3)],
            deviation: Deviation::List(vec![q(1, 2), q(1, 4), q(1, 8)]),
        },
    ));
    let headed = checked(constant(
        Mode::Exact,
        WeightTemplate::GeometricTail { head: vec![q(3, 5)], tail: q(1, 5), ratio: q(1, 2) },
    ));
    vec![
        entry("powers_1_2", powers(q(1, 2)), q(1, 2)),
        entry("powers_1_3", powers(q(1, 3)), q(1, 3)),
        entry("powers_2_3", powers(q(2, 3)), q(2, 3)),
        entry("powers_3_5", powers(q(3, 5)), q(3, 5)),
        entry("powers_1_4", powers(q(1, 4)), q(1, 4)),
        entry("uniform", uniform(), q(1, 1)),
        entry("interleave_1_2_1_3", interleaved(q(1, 2), q(1, 3)), q(1, 2)),
        entry("interleave_1_2_1_4", interleaved(q(1, 2), q(1, 4)), q(1, 2)),
        entry("interleave_2_3_4_9", interleaved(q(2, 3), q(4, 9)), q(2, 3)),
        entry("interleave_1_3_3_5", interleaved(q(1, 3), q(3, 5)), q(1, 3)),
        entry("interleave_1_2_2_3", interleaved(q(1, 2), q(2, 3)), q(2, 3)),
        entry("geometric_1_2", geometric(q(1, 2)), q(1, 2)),
        entry("geometric_1_3", geometric(q(1, 3)), q(1, 3)),
        entry("geometric_head", headed, q(1, 2)),
        entry("explicit_3", explicit(&[(1, 2), (1, 3), (1, 6)]), q(1, 3)),
        entry("explicit_3_dyadic", explicit(&[(4, 7), (2, 7), (1, 7)]), q(1, 2)),
        entry("explicit_4", explicit(&[(2, 5), (3, 10), (1, 5), (1, 10)]), q(1, 2)),
        entry("explicit_tied", explicit(&[(1, 2), (1, 4), (1, 4)]), q(1, 2)),
        entry("prefixed_powers", prefixed, q(1, 2)),
        entry("listed_deviation", listed, q(1, 2)),
        entry("float_powers_1_2", in_float(powers(q(1, 2))), q(1, 2)),
        entry("float_interleave", in_float(interleaved(q(1, 2), q(1, 3))), q(1, 3)),
    ]
}
