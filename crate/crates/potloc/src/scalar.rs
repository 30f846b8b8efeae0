//! Scalar abstraction the numerical core is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar type for all geometry, assembly and solver code.
///
/// Blanket-implemented for anything float-like; in practice `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
///
/// Infallible for `f32` and `f64`, the types this crate is instantiated with.
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must be representable in the scalar type")
}

/// Converts a count into the working scalar type.
pub(crate) fn real_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count must be representable in the scalar type")
}
