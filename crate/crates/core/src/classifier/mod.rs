//! Krieger type of a Bernoulli scheme.
//!
//! [`classify`] gathers [`Evidence`] (three summability tests, then cluster
//! sets and group structure for type III), and [`decide`] turns evidence into
//! a label. `decide` is pure, so a [`Certificate`] can be replayed from its
//! stored evidence alone.

mod criteria;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

pub use criteria::{deviation_series, series, Criterion};

use crate::asymptotics::{
    combined_clusters, inf_liminf, lambda_clusters, summability, ClusterReport, EpsilonRelation, SummabilityVerdict,
    Verdict,
};
use crate::group::{mult_group, Confidence, GroupKind, PairEvidence, DEFAULT_EXPONENT_BOUND};
use crate::scalar::Scalar;
use crate::scheme::{normalize, Alphabet, Mode, ValidatedScheme};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeLabel {
    /// Every coordinate has at least two symbols, so a type I scheme is
    /// always `I_∞`.
    IInfinite,
    II1,
    IIInfinite,
    III0,
    IIILambda(BigRational),
    III1,
    Inconclusive,
}

impl TypeLabel {
    pub fn lambda(&self) -> Option<&BigRational> {
        match self {
            TypeLabel::IIILambda(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_definite(&self) -> bool {
        *self != TypeLabel::Inconclusive
    }

    /// Short name without parameters.
    pub fn kind(&self) -> &'static str {
        match self {
            TypeLabel::IInfinite => "I_inf",
            TypeLabel::II1 => "II_1",
            TypeLabel::IIInfinite => "II_inf",
            TypeLabel::III0 => "III_0",
            TypeLabel::IIILambda(_) => "III_lambda",
            TypeLabel::III1 => "III_1",
            TypeLabel::Inconclusive => "Inconclusive",
        }
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::IIILambda(l) => write!(f, "III_lambda lambda={}", l.render()),
            other => f.write_str(other.kind()),
        }
    }
}

impl Serialize for TypeLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("branch precondition failed: {0}")]
    BranchError(String),
    #[error("evidence is inconclusive: {0}")]
    InconclusiveEvidence(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TypeII1Evidence {
    NotApplicable { reason: String },
    Tested { verdict: SummabilityVerdict },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupTag {
    Trivial,
    Cyclic,
    Dense,
}

/// Closed multiplicative group generated by a set of cluster points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupEvidence {
    #[serde(serialize_with = "crate::report::rationals")]
    pub points: Vec<BigRational>,
    pub kind: GroupTag,
    #[serde(serialize_with = "crate::report::opt_rational")]
    pub generator: Option<BigRational>,
    pub confidence: Confidence,
    pub pairs: Vec<PairEvidence>,
}

impl GroupEvidence {
    fn compute(points: Vec<BigRational>, bound: u64) -> Option<Self> {
        let group = mult_group(&points, bound).ok()?;
        let (kind, generator) = match group.kind {
            GroupKind::Trivial => (GroupTag::Trivial, None),
            GroupKind::Cyclic(g) => (GroupTag::Cyclic, Some(g)),
            GroupKind::Dense => (GroupTag::Dense, None),
        };
        Some(GroupEvidence { points, kind, generator, confidence: group.confidence, pairs: group.evidence })
    }
}

/// Summability of `(ε_n)` over one two-point class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyEvidence {
    #[serde(serialize_with = "crate::report::rational")]
    pub lambda: BigRational,
    pub class: usize,
    pub relation: EpsilonRelation,
    pub verdict: SummabilityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum BranchEvidence {
    /// `limsup |X_n| = ∞`.
    Unbounded {
        clusters: ClusterReport,
        #[serde(serialize_with = "crate::report::rational")]
        inf_liminf: BigRational,
        group: Option<GroupEvidence>,
    },
    /// Every recurring coordinate has two symbols.
    TwoPoint { lambdas: ClusterReport, families: Vec<FamilyEvidence>, group: Option<GroupEvidence> },
    /// Bounded alphabets with more than two symbols.
    BoundedMultiSymbol { limsup_alphabet: usize },
}

/// Everything [`decide`] reads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub mode: Mode,
    #[serde(serialize_with = "crate::report::rational")]
    pub c: BigRational,
    pub type_i: SummabilityVerdict,
    pub type_ii1: TypeII1Evidence,
    pub type_iii: SummabilityVerdict,
    pub branch: Option<BranchEvidence>,
}

/// A condition that fired, with the evidence it read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiredCondition {
    pub id: &'static str,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    /// `Λ = {0, 1}` and `(ε_n)` diverges on `𝓝(1)`; `Λ = {0, 1}` was given
    /// precedence.
    PrecedenceConflict,
    /// `0 ∈ Λ` next to points other than 1; the group was generated from
    /// `Λ \ {0}`.
    AmbiguousZero,
    /// The scheme passed the type III test but its group is trivial.
    TrivialGroupContradiction,
    /// `Λ = {0}`, for which no rule applies.
    ZeroOnlyLambda,
    /// Bounded alphabets with more than two symbols are not reduced to two
    /// symbols.
    BoundedMultiSymbol,
}

impl Warning {
    pub fn message(self) -> &'static str {
        match self {
            Warning::PrecedenceConflict => {
                "Lambda = {0, 1} while epsilon diverges on N(1); the Lambda = {0, 1} rule was applied first"
            }
            Warning::AmbiguousZero => "0 is in Lambda together with points other than 1; group generated from Lambda \\ {0}",
            Warning::TrivialGroupContradiction => "type III test diverged but the ratio group is trivial",
            Warning::ZeroOnlyLambda => "Lambda = {0}: no two-point rule applies",
            Warning::BoundedMultiSymbol => {
                "bounded alphabets with more than two symbols are not reduced to the two-point case"
            }
        }
    }
}

/// Label, fired conditions and warnings derived from evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub label: TypeLabel,
    pub fired: Vec<FiredCondition>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub fired: Vec<FiredCondition>,
    pub mode: Mode,
    pub warnings: Vec<Warning>,
    /// Interpretation choices that apply to this run.
    pub notes: Vec<String>,
    pub evidence: Evidence,
}

impl Certificate {
    /// Re-runs [`decide`] on the stored evidence.
    pub fn replay(&self) -> Decision {
        decide(&self.evidence)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeVerdict {
    pub label: TypeLabel,
    pub certificate: Certificate,
}

impl TypeVerdict {
    /// Replaying the certificate reproduces the label and fired conditions.
    pub fn replays(&self) -> bool {
        let d = self.certificate.replay();
        d.label == self.label && d.fired == self.certificate.fired && d.warnings == self.certificate.warnings
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    /// Cap in the type III series.
    pub c: BigRational,
    /// Exponent bound for commensurability.
    pub exponent_bound: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { c: BigRational::one(), exponent_bound: DEFAULT_EXPONENT_BOUND }
    }
}

pub fn test_type_i(spec: &ValidatedScheme) -> SummabilityVerdict {
    summability(&series(spec, &Criterion::TypeI))
}

pub fn test_type_ii1(spec: &ValidatedScheme) -> TypeII1Evidence {
    let infinite = spec.limsup_alphabet().is_infinite();
    if infinite {
        return TypeII1Evidence::NotApplicable { reason: "some coordinate has an infinite alphabet".into() };
    }
    TypeII1Evidence::Tested { verdict: summability(&series(spec, &Criterion::TypeII1)) }
}

pub fn test_type_iii(spec: &ValidatedScheme, c: &BigRational) -> SummabilityVerdict {
    summability(&series(spec, &Criterion::TypeIII { c: c.clone() }))
}

fn branch_evidence(spec: &ValidatedScheme, bound: u64) -> BranchEvidence {
    match spec.limsup_alphabet() {
        Alphabet::Infinite => {
            let clusters = combined_clusters(spec);
            let liminf = inf_liminf(spec);
            let zero_cluster = clusters.points.first().is_some_and(|p| p.value.is_zero());
            let group = if zero_cluster || liminf.is_zero() {
                None
            } else {
                GroupEvidence::compute(clusters.values(), bound)
            };
            BranchEvidence::Unbounded { clusters, inf_liminf: liminf, group }
        }
        Alphabet::Finite(2) => {
            let lambdas = lambda_clusters(spec).expect("every recurring class has two symbols");
            let mut families = Vec::new();
            for part in &lambdas.parts {
                for family in &part.families {
                    let label = format!("epsilon_n on class {}", family.class);
                    let verdict = summability(&deviation_series(label, &family.indices, &family.deviation));
                    families.push(FamilyEvidence {
                        lambda: part.lambda.clone(),
                        class: family.class,
                        relation: family.relation.clone(),
                        verdict,
                    });
                }
            }
            let nonzero: Vec<BigRational> = lambdas.lambdas().into_iter().filter(|l| !l.is_zero()).collect();
            let group = GroupEvidence::compute(nonzero, bound);
            BranchEvidence::TwoPoint { lambdas: lambdas.report, families, group }
        }
        Alphabet::Finite(size) => BranchEvidence::BoundedMultiSymbol { limsup_alphabet: size },
    }
}

/// Runs the three tests and, for type III, the branch computations.
pub fn gather_evidence(spec: &ValidatedScheme, options: &ClassifyOptions) -> Evidence {
    let type_i = test_type_i(spec);
    let type_ii1 = test_type_ii1(spec);
    let type_iii = test_type_iii(spec, &options.c);
    let branch =
        (type_iii.verdict == Verdict::Divergent).then(|| branch_evidence(spec, options.exponent_bound));
    Evidence { mode: spec.mode(), c: options.c.clone(), type_i, type_ii1, type_iii, branch }
}

fn describe(v: &SummabilityVerdict) -> String {
    match &v.exact_sum {
        Some(sum) => format!("{}: {} (sum = {})", v.series, v.verdict.as_str(), sum.render()),
        None => format!("{}: {}", v.series, v.verdict.as_str()),
    }
}

fn render_set(values: &[BigRational]) -> String {
    let inner: Vec<String> = values.iter().map(Scalar::render).collect();
    format!("{{{}}}", inner.join(", "))
}

struct Decider {
    fired: Vec<FiredCondition>,
    warnings: Vec<Warning>,
}

impl Decider {
    fn fire(&mut self, id: &'static str, inputs: Vec<String>) {
        self.fired.push(FiredCondition { id, inputs });
    }

    fn warn(&mut self, w: Warning) {
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    fn finish(self, label: TypeLabel) -> Decision {
        Decision { label, fired: self.fired, warnings: self.warnings }
    }
}

/// Label from evidence. Order: type I, then II₁, then the type III test
/// (II_∞ by elimination when it converges), then the III subtype.
pub fn decide(evidence: &Evidence) -> Decision {
    let mut d = Decider { fired: Vec::new(), warnings: Vec::new() };
    let i = &evidence.type_i;
    match i.verdict {
        Verdict::Summable => {
            d.fire("type-i-summable", vec![describe(i)]);
            return d.finish(TypeLabel::IInfinite);
        }
        Verdict::Inconclusive => {
            d.fire("type-i-inconclusive", vec![describe(i)]);
            return d.finish(TypeLabel::Inconclusive);
        }
        Verdict::Divergent => d.fire("type-i-divergent", vec![describe(i)]),
    }
    match &evidence.type_ii1 {
        TypeII1Evidence::NotApplicable { reason } => d.fire("type-ii1-not-applicable", vec![reason.clone()]),
        TypeII1Evidence::Tested { verdict } => match verdict.verdict {
            Verdict::Summable => {
                d.fire("type-ii1-summable", vec![describe(verdict)]);
                return d.finish(TypeLabel::II1);
            }
            Verdict::Inconclusive => {
                d.fire("type-ii1-inconclusive", vec![describe(verdict)]);
                return d.finish(TypeLabel::Inconclusive);
            }
            Verdict::Divergent => d.fire("type-ii1-divergent", vec![describe(verdict)]),
        },
    }
    let iii = &evidence.type_iii;
    match iii.verdict {
        Verdict::Summable => {
            d.fire("type-iii-summable", vec![describe(iii)]);
            d.fire("type-ii-inf-by-elimination", vec!["not I, not II_1, not III".into()]);
            return d.finish(TypeLabel::IIInfinite);
        }
        Verdict::Inconclusive => {
            d.fire("type-iii-inconclusive", vec![describe(iii)]);
            return d.finish(TypeLabel::Inconclusive);
        }
        Verdict::Divergent => d.fire("type-iii-divergent", vec![describe(iii)]),
    }
    let label = match &evidence.branch {
        None => {
            d.fire("branch-evidence-missing", Vec::new());
            TypeLabel::Inconclusive
        }
        Some(BranchEvidence::Unbounded { clusters, inf_liminf, group }) => {
            decide_unbounded(&mut d, clusters, inf_liminf, group.as_ref())
        }
        Some(BranchEvidence::TwoPoint { lambdas, families, group }) => {
            decide_two_point(&mut d, lambdas, families, group.as_ref())
        }
        Some(BranchEvidence::BoundedMultiSymbol { limsup_alphabet }) => {
            d.fire("bounded-multi-symbol", vec![format!("limsup |X_n| = {limsup_alphabet}")]);
            d.warn(Warning::BoundedMultiSymbol);
            TypeLabel::Inconclusive
        }
    };
    d.finish(label)
}

fn group_inputs(group: &GroupEvidence) -> Vec<String> {
    let mut inputs = vec![format!("points {}", render_set(&group.points))];
    for pair in &group.pairs {
        inputs.push(match pair.exponents {
            Some((p, q)) => format!("{}^{q} = {}^{p}", pair.a, pair.b),
            None => format!("{} and {} incommensurable", pair.a, pair.b),
        });
    }
    if let Confidence::BoundedDenominator(q) = group.confidence {
        inputs.push(format!("exponents checked up to {q}"));
    }
    inputs
}

fn decide_unbounded(
    d: &mut Decider,
    clusters: &ClusterReport,
    inf_liminf: &BigRational,
    group: Option<&GroupEvidence>,
) -> TypeLabel {
    let zero_cluster = clusters.points.first().is_some_and(|p| p.value.is_zero());
    if zero_cluster {
        d.fire("unbounded-zero-cluster", vec![format!("0 in F = {}", render_set(&clusters.values()))]);
        return TypeLabel::III1;
    }
    if inf_liminf.is_zero() {
        d.fire("unbounded-liminf-zero", vec!["inf_i liminf M_i = 0".into()]);
        return TypeLabel::III1;
    }
    let Some(group) = group else {
        d.fire("unbounded-group-missing", vec![format!("F = {}", render_set(&clusters.values()))]);
        return TypeLabel::Inconclusive;
    };
    match (group.kind, &group.generator) {
        (GroupTag::Dense, _) => {
            d.fire("unbounded-group-dense", group_inputs(group));
            TypeLabel::III1
        }
        (GroupTag::Cyclic, Some(lambda)) => {
            d.fire("unbounded-group-cyclic", group_inputs(group));
            TypeLabel::IIILambda(lambda.clone())
        }
        _ => {
            d.fire("unbounded-group-trivial", group_inputs(group));
            TypeLabel::III0
        }
    }
}

fn decide_two_point(
    d: &mut Decider,
    lambdas: &ClusterReport,
    families: &[FamilyEvidence],
    group: Option<&GroupEvidence>,
) -> TypeLabel {
    let points = lambdas.values();
    let one = BigRational::one();
    let has_zero = points.iter().any(Zero::is_zero);
    let lambda_text = format!("Lambda = {}", render_set(&points));
    if has_zero && points.iter().any(|p| !p.is_zero() && *p != one) {
        d.warn(Warning::AmbiguousZero);
    }
    let divergent: Vec<&FamilyEvidence> = families
        .iter()
        .filter(|f| !f.lambda.is_zero() && f.verdict.verdict == Verdict::Divergent)
        .collect();
    if points.len() == 2 && has_zero && points[1] == one {
        if divergent.iter().any(|f| f.lambda == one) {
            d.warn(Warning::PrecedenceConflict);
        }
        d.fire("two-point-lambda-zero-one", vec![lambda_text]);
        return TypeLabel::III0;
    }
    if let Some(f) = divergent.first() {
        d.fire(
            "two-point-epsilon-divergent",
            vec![lambda_text, format!("class {} (lambda = {}): {}", f.class, f.lambda.render(), describe(&f.verdict))],
        );
        return TypeLabel::III1;
    }
    let pending: Vec<&FamilyEvidence> = families
        .iter()
        .filter(|f| !f.lambda.is_zero() && f.verdict.verdict != Verdict::Summable)
        .collect();
    if let Some(f) = pending.first() {
        d.fire("two-point-epsilon-inconclusive", vec![format!("class {}: {}", f.class, describe(&f.verdict))]);
        return TypeLabel::Inconclusive;
    }
    let Some(group) = group else {
        d.fire("two-point-lambda-zero-only", vec![lambda_text]);
        d.warn(Warning::ZeroOnlyLambda);
        return TypeLabel::Inconclusive;
    };
    let mut inputs = vec![lambda_text, "epsilon_n summable on every N(t), t > 0".into()];
    inputs.extend(group_inputs(group));
    match (group.kind, &group.generator) {
        (GroupTag::Dense, _) => {
            d.fire("two-point-group-dense", inputs);
            TypeLabel::III1
        }
        (GroupTag::Cyclic, Some(lambda)) => {
            d.fire("two-point-group-cyclic", inputs);
            TypeLabel::IIILambda(lambda.clone())
        }
        _ => {
            d.fire("two-point-group-trivial", inputs);
            d.warn(Warning::TrivialGroupContradiction);
            TypeLabel::Inconclusive
        }
    }
}

fn notes_for(evidence: &Evidence) -> Vec<String> {
    let mut notes = Vec::new();
    match &evidence.branch {
        Some(BranchEvidence::Unbounded { .. }) => {
            notes.push("symbol 0 is excluded from the ratio sets M_i (its ratio is identically 1)".into());
        }
        Some(BranchEvidence::TwoPoint { .. }) => {
            notes.push("summability is read on the deviations epsilon_n of lambda_n = lambda e^{-epsilon_n}".into());
        }
        _ => {}
    }
    if matches!(evidence.type_ii1, TypeII1Evidence::NotApplicable { .. }) {
        notes.push("II_1 test needs finite alphabets".into());
    }
    if evidence.branch.is_some() && evidence.mode == Mode::Float {
        notes.push("weights evaluated in f64; cluster points are exact template limits".into());
    }
    notes
}

/// Classifies a scheme with default options (`C = 1`).
pub fn classify(spec: &ValidatedScheme) -> TypeVerdict {
    classify_with(spec, &ClassifyOptions::default())
}

pub fn classify_with(spec: &ValidatedScheme, options: &ClassifyOptions) -> TypeVerdict {
    // the type is invariant under symbol permutations, so work on the sorted form
    let spec = match normalize(spec.spec()) {
        Ok((normalized, _)) => normalized,
        Err(_) => spec.clone(),
    };
    let evidence = gather_evidence(&spec, options);
    let decision = decide(&evidence);
    let notes = notes_for(&evidence);
    TypeVerdict {
        label: decision.label,
        certificate: Certificate {
            fired: decision.fired,
            mode: evidence.mode,
            warnings: decision.warnings,
            notes,
            evidence,
        },
    }
}

/// Type III subtype for unbounded alphabets.
pub fn classify_iii_unbounded(spec: &ValidatedScheme) -> Result<TypeVerdict, ClassifyError> {
    if spec.limsup_alphabet() != Alphabet::Infinite {
        return Err(ClassifyError::BranchError("limsup |X_n| is finite; use the bounded branch".into()));
    }
    finish_branch(classify(spec))
}

/// Type III subtype for two-symbol schemes.
pub fn classify_iii_two_point(spec: &ValidatedScheme) -> Result<TypeVerdict, ClassifyError> {
    if spec.limsup_alphabet() != Alphabet::Finite(2) {
        return Err(ClassifyError::BranchError("recurring coordinates must have exactly two symbols".into()));
    }
    finish_branch(classify(spec))
}

fn finish_branch(verdict: TypeVerdict) -> Result<TypeVerdict, ClassifyError> {
    if verdict.certificate.evidence.type_iii.verdict != Verdict::Divergent {
        return Err(ClassifyError::BranchError("scheme is not of type III".into()));
    }
    if let Some(f) = verdict.certificate.fired.iter().find(|f| f.id.ends_with("-inconclusive")) {
        return Err(ClassifyError::InconclusiveEvidence(f.id.to_string()));
    }
    Ok(verdict)
}
