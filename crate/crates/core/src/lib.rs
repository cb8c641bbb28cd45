//! Realizations of finite metric spaces built by walking the 1-skeleton of
//! the tight span, together with split systems, instance generators, a
//! minimal-subrealization MIP writer and brute-force oracles.
//!
//! All arithmetic is exact ([`Rational`]); no comparison uses a tolerance.

mod bits;
pub mod error;
pub mod graph;
pub mod instances;
pub mod io;
pub mod metric;
pub mod mip;
pub mod oracle;
pub mod realizer;
pub mod splits;
pub mod tightspan;

pub use error::{Error, Result};
pub use graph::{verify_realization, Edge, RealizationGraph, VerificationReport};
pub use metric::{linf_dist, FiniteMetric, TightPoint};
pub use realizer::{realize, simplex_step, stats, StatsReport};

pub type Rational = num_rational::BigRational;

/// Largest supported ground set; label subsets are stored as `u128` masks.
pub const MAX_LABELS: usize = 128;

pub fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
