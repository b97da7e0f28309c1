//! Scalar abstraction shared by every kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the solver can run on (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts a literal; every `f64` is representable (possibly rounded).
    #[inline(always)]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }

    #[inline(always)]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap()
    }

    #[inline(always)]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap()
    }
}

impl Real for f32 {}
impl Real for f64 {}
