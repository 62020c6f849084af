//! Scalar abstraction: every numerical routine in this crate is generic over
//! [`Real`], instantiated in practice with `f32` or `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Shorthand for converting an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal conversion")
    }

    /// Convert to `f64` (for reporting and serialization).
    #[inline]
    fn to_f64x(self) -> f64 {
        self.to_f64().expect("f64 conversion")
    }

    #[inline]
    fn from_usize_(x: usize) -> Self {
        Self::from_usize(x).expect("usize conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}
