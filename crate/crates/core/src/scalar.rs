//! Scalar abstraction for the analytic parts of the library.

use std::fmt::{Debug, Display};

use num_traits as nt;

/// Floating-point types the entropy, collapse and estimator math is generic over.
pub trait Scalar:
    nt::Float
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(v).expect("f64 literal representable")
    }

    /// Conversion from a count.
    #[inline]
    fn count(v: u64) -> Self {
        <Self as nt::FromPrimitive>::from_u64(v).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        nt::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: nt::Float
        + nt::FloatConst
        + nt::FromPrimitive
        + nt::ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}
