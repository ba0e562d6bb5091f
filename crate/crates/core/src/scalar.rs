//! Numeric abstractions shared by the scoring, sampling and simulation code.
//!
//! Ratio-style metrics only need field arithmetic, so they are written against
//! [`Scalar`], which `f32`, `f64` and [`Rational64`] all implement. Code that
//! needs transcendental functions (moments, variates, event times) uses
//! [`Real`], which adds [`num_traits::Float`].

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, Num, NumCast, ToPrimitive};

/// A number usable as a score: closed under field operations and
/// constructible from an integer ratio.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// `num / den` in this representation. `den` must be nonzero.
    fn from_ratio(num: u64, den: u64) -> Self;

    /// Nearest `f64`, for reporting.
    fn to_f64_lossy(self) -> f64;
}

macro_rules! impl_scalar_float {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_ratio(num: u64, den: u64) -> Self {
                num as $t / den as $t
            }

            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_scalar_float!(f32);
impl_scalar_float!(f64);

impl Scalar for Rational64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        Rational64::new(num as i64, den as i64)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Floating point scalar: `f32` or `f64`.
pub trait Real: Scalar + Float + FromPrimitive + NumCast + Default + serde::Serialize {
    fn from_f64_lossy(v: f64) -> Self {
        <Self as NumCast>::from(v).unwrap_or_else(Self::nan)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Relative closeness used for "identical" numeric values.
pub fn approx_eq_rel(a: f64, b: f64, rel_tol: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= rel_tol * a.abs().max(b.abs())
}
