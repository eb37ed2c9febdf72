use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar for probabilities, masses and expectations.
///
/// Implemented by `f32` and `f64`. Everything numeric in this crate is
/// generic over it; the crate root exports `f64` aliases for the common
/// case.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum<Self> + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum<Self> + Debug + Display + Send + Sync + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn scalar<T: Scalar>(x: f64) -> T {
    T::from(x).expect("constant not representable in scalar type")
}
