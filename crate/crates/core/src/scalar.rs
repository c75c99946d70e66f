use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point type used by sampled kernels, feature fields and the
/// convolution routines.
///
/// Representation theory (decompositions, analytic bases, the numeric oracle)
/// always runs in `f64`; sampled tensors are cast into `T` at the boundary so
/// that the forward pass can run in single precision if desired.
pub trait Scalar:
    'static
    + Send
    + Sync
    + Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + ndarray::ScalarOperand
{
    #[inline]
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts to every Scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
