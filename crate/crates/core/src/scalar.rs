//! Scalar abstraction shared by every model.
//!
//! All physics is written once against [`Real`]; `f64` is the working
//! precision for design studies, `f32` is supported for bulk sweeps where
//! storage matters more than the last digits.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar usable by the models: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in target float")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

/// Power ratio in decibel, `10 log10(v)`.
pub fn to_db<T: Real>(v: T) -> T {
    lit::<T>(10.0) * v.log10()
}

/// Inverse of [`to_db`].
pub fn from_db<T: Real>(db: T) -> T {
    lit::<T>(10.0).powf(db / lit(10.0))
}
