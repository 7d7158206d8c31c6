//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type usable as the component of a complex amplitude.
///
/// Implemented for `f32` and `f64`. All kernels are written against this
/// trait; tolerances quoted in tests assume `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literals and RNG draws.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon scaled into a comfortable comparison tolerance.
    fn default_tolerance() -> Self;
}

impl Real for f32 {
    fn default_tolerance() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn default_tolerance() -> Self {
        1e-10
    }
}
