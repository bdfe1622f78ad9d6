//! Scalar abstraction for all distance/time arithmetic.
//!
//! Everything in this crate measures distances in meters and times in
//! minutes; the concrete float type is a type parameter so the solver can
//! run on `f32` or `f64`. The crate root exports `f64` aliases, which is
//! what the CLI and the acceptance tolerances assume.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, NumAssign};

/// Floating-point scalar used for distances (meters), times (minutes),
/// water loads (liters-equivalent) and objective values.
pub trait Scalar:
    Float + NumAssign + FromStr + Display + Debug + Send + Sync + 'static
{
    fn from_f64(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 -> scalar conversion")
    }

    fn to_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar -> f64 conversion")
    }

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }

    /// Comparison slack for feasibility checks (capacity, time spread,
    /// window bounds), scaled to the magnitude being compared.
    fn feas_eps(scale: Self) -> Self {
        (Self::one() + scale.abs()) * Self::epsilon() * Self::from_f64(1e3)
    }
}

impl<T> Scalar for T where
    T: Float + NumAssign + FromStr + Display + Debug + Send + Sync + 'static
{
}
