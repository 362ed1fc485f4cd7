//! Scalar abstraction for the numeric kernels.
//!
//! All grid math is generic over [`Scalar`] so the same code runs in `f32`
//! or `f64`. The documented tolerances (adjointness to 1e-10, spectral
//! residual to 1e-8, curvature oracle agreement to 1e-12) are achievable in
//! `f64`; `f32` is offered for memory-bound experimentation.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Signed, ToPrimitive};

/// Floating-point scalar usable throughout the toolkit: `f32` or `f64`.
///
/// The bounds also satisfy `rustfft::FftNum`, so solver code can plan FFTs
/// for any `Scalar` without extra constraints.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Shorthand for lossy conversion from `f64` (trusted constants only).
    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("f64 constant representable in scalar type")
    }

    /// Shorthand for converting grid sizes and counters.
    fn from_usize_lossy(value: usize) -> Self {
        Self::from_usize(value).expect("usize representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
