//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::distributions::uniform::SampleUniform;

/// Floating-point scalar usable throughout the numeric core.
///
/// Everything the library computes (paths, metrics, series, characteristic
/// functions) is generic over this trait; `f64` is the default instantiation
/// and `f32` is supported for the path and metric algebra.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + SampleUniform
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough construction from `f64` literals and constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant representable in Real")
    }

    /// Conversion to `f64` for reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real value representable as f64")
    }

    /// Construction from a usize count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize count representable in Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}
