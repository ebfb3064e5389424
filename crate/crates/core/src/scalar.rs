//! Scalar abstraction shared by the numerical layers.
//!
//! Graph weights, potentials, metric matrices and the comparison metrics are
//! written against [`Real`] so that the same code runs in `f32` and `f64`.
//! Random sampling and experiment bookkeeping stay in `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only for values the type cannot represent at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Iterative-solver residual tolerance: `1e-10`, or a few hundred ulps when the type is coarser.
    fn solver_tolerance() -> Self {
        let floor = Self::epsilon() * Self::lit(256.0);
        let target = Self::lit(1e-10);
        if floor > target {
            floor
        } else {
            target
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
