//! Krieger type classification of Bernoulli schemes and ITPFI factors.
//!
//! The analytic path ([`classifier::classify`]) reads cluster sets and
//! summability of closed-form weight templates. The empirical path
//! ([`cocycle`]) searches finite blocks for Radon–Nikodym cocycle values and
//! samples them, so the two verdicts can be compared.

pub mod scalar;
pub mod asymptotics;
pub mod classifier;
pub mod cocycle;
pub mod fixtures;
pub mod group;
pub(crate) mod report;
pub mod scheme;

pub use num_rational::BigRational;
pub use scalar::Scalar;

/// Exact scalar used for all template parameters.
pub type Rational = BigRational;
