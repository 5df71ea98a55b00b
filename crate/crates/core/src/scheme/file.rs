//! TOML spec files.
//!
//! ```toml
//! mode = "exact"                      # or "float"
//! prefix = [["3/4", "1/4"]]           # coordinates 1..=P
//!
//! [[classes]]
//! indices = { start = 2, step = 1 }   # or { list = [5, 9] }
//! template = { kind = "two_point", params = { limit = "1/2" } }
//! ```
//!
//! Template kinds and their params:
//! - `explicit`: `weights`
//! - `geometric_tail`: `head` (optional), `tail`, `ratio`
//! - `two_point`: `limit`, `deviation` (optional), `swapped` (optional)
//! - `perturbed`: `limit`, `deviation`
//!
//! A deviation is `{ kind = "zero" }`, `{ kind = "geometric", rho = .. }`,
//! `{ kind = "power", exponent = .. }` or `{ kind = "list", values = [..] }`.
//! Numbers may be integers, decimals or `"p/q"` strings and are read exactly.
//! Factor files set `kind = "factor"` at the top level and give eigenvalue
//! lists in place of weights.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Deviation, FactorClass, FactorSpec, IndexClass, IndexSet, Mode, SchemeSpec, WeightTemplate};
use crate::scalar::{parse_rational, rational_from_decimal_f64, render_rational};

/// Parse failure with a 1-based source position when one is known.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct FileError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(line), Some(column)) => write!(f, "line {line}, column {column}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Scheme(SchemeSpec),
    Factor(FactorSpec),
}

#[derive(Debug, Clone, PartialEq)]
struct Num(BigRational);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Int(i) => Some(BigRational::from_integer(i.into())),
            Raw::Float(x) => rational_from_decimal_f64(x),
            Raw::Text(s) => parse_rational(&s),
        };
        parsed.map(Num).ok_or_else(|| serde::de::Error::custom("expected a number or a \"p/q\" string"))
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&render_rational(&self.0))
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum RawKind {
    #[default]
    Scheme,
    Factor,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default, skip_serializing_if = "is_scheme")]
    kind: RawKind,
    mode: RawMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    prefix: Vec<Vec<Num>>,
    #[serde(default)]
    classes: Vec<RawClass>,
}

fn is_scheme(kind: &RawKind) -> bool {
    *kind == RawKind::Scheme
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
enum RawMode {
    Exact,
    Float,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    indices: RawIndices,
    template: RawTemplate,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum RawIndices {
    Progression {
        start: usize,
        #[serde(default = "one")]
        step: usize,
    },
    List {
        list: Vec<usize>,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
enum RawTemplate {
    Explicit {
        weights: Vec<Num>,
    },
    GeometricTail {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        head: Vec<Num>,
        tail: Num,
        ratio: Num,
    },
    TwoPoint {
        limit: Num,
        #[serde(default, skip_serializing_if = "RawDeviation::is_zero")]
        deviation: RawDeviation,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        swapped: bool,
    },
    Perturbed {
        limit: Vec<Num>,
        deviation: RawDeviation,
    },
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDeviation {
    #[default]
    Zero,
    Geometric {
        rho: Num,
    },
    Power {
        exponent: Num,
    },
    List {
        values: Vec<Num>,
    },
}

impl RawDeviation {
    fn is_zero(&self) -> bool {
        matches!(self, RawDeviation::Zero)
    }
}

fn nums(values: Vec<Num>) -> Vec<BigRational> {
    values.into_iter().map(|n| n.0).collect()
}

fn raw_nums(values: &[BigRational]) -> Vec<Num> {
    values.iter().cloned().map(Num).collect()
}

impl From<RawDeviation> for Deviation {
    fn from(raw: RawDeviation) -> Self {
        match raw {
            RawDeviation::Zero => Deviation::Zero,
            RawDeviation::Geometric { rho } => Deviation::Geometric { rho: rho.0 },
            RawDeviation::Power { exponent } => Deviation::Power { exponent: exponent.0 },
            RawDeviation::List { values } => Deviation::List(nums(values)),
        }
    }
}

impl From<&Deviation> for RawDeviation {
    fn from(deviation: &Deviation) -> Self {
        match deviation {
            Deviation::Zero => RawDeviation::Zero,
            Deviation::Geometric { rho } => RawDeviation::Geometric { rho: Num(rho.clone()) },
            Deviation::Power { exponent } => RawDeviation::Power { exponent: Num(exponent.clone()) },
            Deviation::List(values) => RawDeviation::List { values: raw_nums(values) },
        }
    }
}

impl From<RawTemplate> for WeightTemplate {
    fn from(raw: RawTemplate) -> Self {
        match raw {
            RawTemplate::Explicit { weights } => WeightTemplate::ExplicitFinite(nums(weights)),
            RawTemplate::GeometricTail { head, tail, ratio } => {
                WeightTemplate::GeometricTail { head: nums(head), tail: tail.0, ratio: ratio.0 }
            }
            RawTemplate::TwoPoint { limit, deviation, swapped } => {
                WeightTemplate::TwoPoint { limit: limit.0, deviation: deviation.into(), swapped }
            }
            RawTemplate::Perturbed { limit, deviation } => {
                WeightTemplate::PerturbedVector { limit: nums(limit), deviation: deviation.into() }
            }
        }
    }
}

impl From<&WeightTemplate> for RawTemplate {
    fn from(template: &WeightTemplate) -> Self {
        match template {
            WeightTemplate::ExplicitFinite(w) => RawTemplate::Explicit { weights: raw_nums(w) },
            WeightTemplate::GeometricTail { head, tail, ratio } => RawTemplate::GeometricTail {
                head: raw_nums(head),
                tail: Num(tail.clone()),
                ratio: Num(ratio.clone()),
            },
            WeightTemplate::TwoPoint { limit, deviation, swapped } => RawTemplate::TwoPoint {
                limit: Num(limit.clone()),
                deviation: deviation.into(),
                swapped: *swapped,
            },
            WeightTemplate::PerturbedVector { limit, deviation } => {
                RawTemplate::Perturbed { limit: raw_nums(limit), deviation: deviation.into() }
            }
        }
    }
}

impl From<RawIndices> for IndexSet {
    fn from(raw: RawIndices) -> Self {
        match raw {
            RawIndices::Progression { start, step } => IndexSet::Progression { start, step },
            RawIndices::List { list } => IndexSet::List(list),
        }
    }
}

impl From<&IndexSet> for RawIndices {
    fn from(indices: &IndexSet) -> Self {
        match indices {
            IndexSet::Progression { start, step } => RawIndices::Progression { start: *start, step: *step },
            IndexSet::List(list) => RawIndices::List { list: list.clone() },
        }
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses a scheme or factor file.
pub fn parse_document(text: &str) -> Result<Document, FileError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let (line, column) = match e.span() {
            Some(span) => {
                let (l, c) = position(text, span.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        FileError { line, column, message: e.message().trim().to_string() }
    })?;
    let mode = match raw.mode {
        RawMode::Exact => Mode::Exact,
        RawMode::Float => Mode::Float,
    };
    let prefix: Vec<Vec<BigRational>> = raw.prefix.into_iter().map(nums).collect();
    let pairs = raw.classes.into_iter().map(|c| (IndexSet::from(c.indices), WeightTemplate::from(c.template)));
    Ok(match raw.kind {
        RawKind::Scheme => Document::Scheme(SchemeSpec {
            mode,
            prefix,
            classes: pairs.map(|(indices, template)| IndexClass { indices, template }).collect(),
        }),
        RawKind::Factor => Document::Factor(FactorSpec {
            mode,
            prefix,
            classes: pairs.map(|(indices, spectrum)| FactorClass { indices, spectrum }).collect(),
        }),
    })
}

/// Parses a file that must describe a scheme.
pub fn parse_scheme(text: &str) -> Result<SchemeSpec, FileError> {
    match parse_document(text)? {
        Document::Scheme(spec) => Ok(spec),
        Document::Factor(_) => Err(FileError {
            line: None,
            column: None,
            message: "expected a scheme file, found kind = \"factor\"".into(),
        }),
    }
}

fn render(raw: RawFile) -> String {
    toml::to_string(&raw).expect("spec files always serialize")
}

fn raw_mode(mode: Mode) -> RawMode {
    match mode {
        Mode::Exact => RawMode::Exact,
        Mode::Float => RawMode::Float,
    }
}

pub fn write_scheme(spec: &SchemeSpec) -> String {
    render(RawFile {
        kind: RawKind::Scheme,
        mode: raw_mode(spec.mode),
        prefix: spec.prefix.iter().map(|w| raw_nums(w)).collect(),
        classes: spec
            .classes
            .iter()
            .map(|c| RawClass { indices: (&c.indices).into(), template: (&c.template).into() })
            .collect(),
    })
}

pub fn write_factor(factor: &FactorSpec) -> String {
    render(RawFile {
        kind: RawKind::Factor,
        mode: raw_mode(factor.mode),
        prefix: factor.prefix.iter().map(|w| raw_nums(w)).collect(),
        classes: factor
            .classes
            .iter()
            .map(|c| RawClass { indices: (&c.indices).into(), template: (&c.spectrum).into() })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    const POWERS: &str = r#"
mode = "exact"

[[classes]]
indices = { start = 1 }
template = { kind = "two_point", params = { limit = "1/2" } }
"#;

    #[test]
    fn parses_powers_file() {
        let spec = parse_scheme(POWERS).unwrap();
        assert_eq!(spec.mode, Mode::Exact);
        assert_eq!(spec.classes[0].indices, IndexSet::all_from(1));
        assert_eq!(spec.classes[0].template, WeightTemplate::two_point(q(1, 2)));
    }

    #[test]
    fn numbers_are_exact() {
        let text = r#"
mode = "float"
prefix = [[0.75, "1/4"], [1, 1]]

[[classes]]
indices = { list = [3] }
template = { kind = "perturbed", params = { limit = [0.5, 0.5], deviation = { kind = "power", exponent = 2 } } }

[[classes]]
indices = { start = 4, step = 1 }
template = { kind = "geometric_tail", params = { tail = 0.5, ratio = "1/2" } }
"#;
        let spec = parse_scheme(text).unwrap();
        assert_eq!(spec.prefix[0], vec![q(3, 4), q(1, 4)]);
        assert_eq!(spec.prefix[1], vec![q(1, 1), q(1, 1)]);
        assert_eq!(
            spec.classes[0].template,
            WeightTemplate::PerturbedVector {
                limit: vec![q(1, 2), q(1, 2)],
                deviation: Deviation::Power { exponent: q(2, 1) }
            }
        );
        assert_eq!(spec.classes[0].indices, IndexSet::List(vec![3]));
    }

    #[test]
    fn round_trip() {
        let spec = parse_scheme(POWERS).unwrap();
        let text = write_scheme(&spec);
        assert_eq!(parse_scheme(&text).unwrap(), spec);
        let factor = crate::scheme::scheme_to_factor(&spec);
        match parse_document(&write_factor(&factor)).unwrap() {
            Document::Factor(f) => assert_eq!(f, factor),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_scheme("mode = \"exact\"\nprefix = [[\"1/0\", 1]]\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.column.is_some());
        let err = parse_scheme("mode = \"exact\"\n[[classes]]\nindices = { start = 1 }\ntemplate = { kind = \"bogus\", params = {} }\n")
            .unwrap_err();
        assert_eq!(err.line, Some(4));
        assert!(parse_scheme("mode = exact").is_err());
    }
}
