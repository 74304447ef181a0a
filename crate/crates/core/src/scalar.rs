//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All measure, kernel and random-walk arithmetic is written against [`Real`]
//! so that `f32` and `f64` instantiations come from the same code. The crate
//! root re-exports `f64` aliases for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + LinalgScalar
    + ScalarOperand
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; every constant in the crate goes through here.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `ln(1 + e^a)` without overflow.
pub fn softplus<R: Real>(a: R) -> R {
    a.max(R::zero()) + (-a.abs()).exp().ln_1p()
}

/// `ln cosh(a)` without overflow.
pub fn log_cosh<R: Real>(a: R) -> R {
    let a = a.abs();
    a + (R::lit(-2.0) * a).exp().ln_1p() - R::LN_2()
}

/// Logistic function `1 / (1 + e^{-a})`, stable for large `|a|`.
pub fn sigmoid<R: Real>(a: R) -> R {
    if a >= R::zero() {
        R::one() / (R::one() + (-a).exp())
    } else {
        let e = a.exp();
        e / (R::one() + e)
    }
}

/// `ln Σ exp(x_i)`; `-inf` for an empty input.
pub fn log_sum_exp<R: Real>(xs: &[R]) -> R {
    let m = xs.iter().copied().fold(R::neg_infinity(), R::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<R>().ln()
}
