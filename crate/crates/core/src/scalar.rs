//! Scalar abstraction for the numeric core.
//!
//! Graph and matrix primitives are generic over [`Scalar`] so the same code
//! serves f32 and f64. Training, checkpoints, and the gradient checker are
//! pinned to f64 through the crate-root aliases; the tolerances they assert
//! are not reachable in single precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable in every numeric kernel of this crate.
pub trait Scalar:
    Float + NumAssign + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless-enough conversion from f64 for constants and config values.
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
