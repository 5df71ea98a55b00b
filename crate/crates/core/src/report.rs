//! Serde helpers that write exact rationals as `"p/q"` strings.

use num_rational::BigRational;
use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::scalar::{render_rational, Scalar};

pub fn rational<S: Serializer>(value: &BigRational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&render_rational(value))
}

pub fn opt_rational<S: Serializer>(value: &Option<BigRational>, serializer: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => rational(v, serializer),
        None => serializer.serialize_none(),
    }
}

pub fn rationals<S: Serializer>(values: &[BigRational], serializer: S) -> Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&render_rational(v))?;
    }
    seq.end()
}

pub fn scalar<T: Scalar, S: Serializer>(value: &T, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&value.render())
}

pub fn scalar_rows<T: Scalar, S: Serializer>(rows: &[Vec<T>], serializer: S) -> Result<S::Ok, S::Error> {
    let rendered: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(Scalar::render).collect()).collect();
    serializer.collect_seq(rendered)
}
