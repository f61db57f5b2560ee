//! Certified computations for twofold Cantor sets.
//!
//! A twofold Cantor set is the attractor `K_pq` of the four similarities
//! `S1(x) = px`, `S2(x) = qx`, `S3(x) = px + 1 - p`, `S4(x) = qx + 1 - q`
//! with `0 < p, q < 1/16`, provided the images `S1^m(A)` and `S2^n(A)` of
//! `A = S3(K) ∪ S4(K)` never meet.
//!
//! All geometry is generic over [`Scalar`]: [`Rational`] gives bit-exact
//! certificates, [`Interval64`] and [`Interval32`] give fast outward-rounded
//! enclosures.

pub mod density;
pub mod dimension;
mod error;
pub mod ifs;
pub mod numeric;
pub mod represent;
pub mod scan;
pub mod tfcert;

pub use error::{Error, Result};
pub use numeric::{Caps, Interval, Mode, Params, RoundingFloat, Scalar, Span};

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;
/// Outward-rounded interval with `f64` endpoints.
pub type Interval64 = Interval<f64>;
/// Outward-rounded interval with `f32` endpoints.
pub type Interval32 = Interval<f32>;

pub type ExactParams = Params<Rational>;
pub type FloatParams = Params<Interval64>;
pub type ExactSystem = ifs::SimilaritySystem<Rational>;
pub type FloatSystem = ifs::SimilaritySystem<Interval64>;
