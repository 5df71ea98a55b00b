//! Scalar abstraction shared by the exact (rational) and floating-point paths.
//!
//! Weight arithmetic, cocycle products, and group reduction are written once
//! against [`Scalar`] and instantiated with [`crate::Rational`] for bit-exact
//! results or with `f64`/`f32` where transcendental templates force rounding.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Ordered field element used for weights and cocycle values.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// `true` when every field operation is exact.
    const EXACT: bool;

    /// Converts an exact rational; floats round to nearest.
    fn from_rational(value: &BigRational) -> Self;

    /// Wraps a value that was computed in floating point. Exact types refuse.
    fn from_f64(value: f64) -> Option<Self>;

    fn from_int(value: i64) -> Self;

    fn as_f64(&self) -> f64;

    /// Natural logarithm, always evaluated in `f64`.
    fn ln(&self) -> f64;

    fn powi(&self, exp: i32) -> Self;

    /// `n`-th root of a positive value. Exact types return `None` when the
    /// root is irrational.
    fn nth_root(&self, n: u32) -> Option<Self>;

    fn sqrt(&self) -> Option<Self> {
        self.nth_root(2)
    }

    /// Equality within `tol` for floats, exact equality for exact types.
    fn near(&self, other: &Self, tol: f64) -> bool;

    /// Exact value, if representable.
    fn to_rational(&self) -> Option<BigRational>;

    /// Canonical text form: `p/q` for rationals, shortest round-trip decimal
    /// for floats.
    fn render(&self) -> String;

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(value: &BigRational) -> Self {
        value.clone()
    }

    fn from_f64(_: f64) -> Option<Self> {
        None
    }

    fn from_int(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn as_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn ln(&self) -> f64 {
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }

    fn powi(&self, exp: i32) -> Self {
        num_traits::Pow::pow(self, exp)
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if n == 0 || self.is_negative() {
            return None;
        }
        let num = exact_root(self.numer(), n)?;
        let den = exact_root(self.denom(), n)?;
        Some(BigRational::new(num, den))
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn render(&self) -> String {
        render_rational(self)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_rational(value: &BigRational) -> Self {
                rational_to_f64(value) as $t
            }

            fn from_f64(value: f64) -> Option<Self> {
                Some(value as $t)
            }

            fn from_int(value: i64) -> Self {
                value as $t
            }

            fn as_f64(&self) -> f64 {
                *self as f64
            }

            fn ln(&self) -> f64 {
                (*self as f64).ln()
            }

            fn powi(&self, exp: i32) -> Self {
                <$t>::powi(*self, exp)
            }

            fn nth_root(&self, n: u32) -> Option<Self> {
                if n == 0 || *self < 0.0 {
                    return None;
                }
                Some(match n {
                    1 => *self,
                    2 => <$t>::sqrt(*self),
                    _ => ((*self as f64).ln() / n as f64).exp() as $t,
                })
            }

            fn near(&self, other: &Self, tol: f64) -> bool {
                ((*self - *other) as f64).abs() <= tol
            }

            fn to_rational(&self) -> Option<BigRational> {
                BigRational::from_float(*self)
            }

            fn render(&self) -> String {
                format!("{:?}", self)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// `p/q` (or `p` for integers) in lowest terms.
pub fn render_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub(crate) fn rational_to_f64(value: &BigRational) -> f64 {
    match value.to_f64() {
        Some(x) if x.is_finite() && (x != 0.0 || value.is_zero()) => x,
        _ => {
            let sign = if value.is_negative() { -1.0 } else { 1.0 };
            sign * (ln_bigint(&value.numer().abs()) - ln_bigint(value.denom())).exp()
        }
    }
}

/// Natural log of a positive big integer without overflowing `f64`.
pub(crate) fn ln_bigint(value: &BigInt) -> f64 {
    let bits = value.bits();
    if bits <= 1000 {
        return value.to_f64().map_or(f64::NAN, f64::ln);
    }
    let shift = bits - 64;
    let top: BigInt = value >> shift;
    top.to_f64().map_or(f64::NAN, f64::ln) + shift as f64 * std::f64::consts::LN_2
}

fn exact_root(value: &BigInt, n: u32) -> Option<BigInt> {
    if value.is_one() || value.is_zero() || n == 1 {
        return Some(value.clone());
    }
    // a root of order n needs at least n bits unless the value is 1
    if u64::from(n) >= value.bits() {
        return None;
    }
    let root = value.nth_root(n);
    if num_traits::Pow::pow(&root, n) == *value {
        Some(root)
    } else {
        None
    }
}

/// Parses `p/q`, a decimal like `0.125` or `1e-3`, or an integer into an
/// exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::parse_bytes(num.trim().as_bytes(), 10)?;
        let den = BigInt::parse_bytes(den.trim().as_bytes(), 10)?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(num, num_traits::Pow::pow(&ten, (-scale) as u32))
    };
    Some(value)
}

/// Exact rational for a finite float, via its shortest decimal form.
pub fn rational_from_decimal_f64(value: f64) -> Option<BigRational> {
    if !value.is_finite() {
        return None;
    }
    parse_rational(&format!("{value:e}"))
}
