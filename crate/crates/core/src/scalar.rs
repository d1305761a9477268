//! Floating-point abstraction shared by the numeric parts of the crate.

use num_traits::{Float, FromPrimitive, NumCast};
use std::fmt::{Debug, Display};

/// Real scalar used by the set-function machinery and the influence estimators.
///
/// Implemented for `f32` and `f64`. Exact quantities (distances, exact influences)
/// are reported as [`crate::Fraction`] instead.
pub trait Scalar:
    Float + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or computed constant into this scalar type.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts to every Scalar")
    }

    /// Widens to `f64`.
    fn as_f64(self) -> f64 {
        <Self as num_traits::ToPrimitive>::to_f64(&self).expect("Scalar widens to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an exact fraction into a scalar.
pub fn fraction_to<S: Scalar>(q: &crate::Fraction) -> S {
    S::of(*q.numer() as f64 / *q.denom() as f64)
}
