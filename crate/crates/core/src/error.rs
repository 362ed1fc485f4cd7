//! Error type shared by the core modules.

use thiserror::Error;

/// Errors raised by grid operations, the curvature engine and the solver.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Two grids that must share dimensions do not.
    #[error("dimension mismatch: {context} ({left_width}x{left_height} vs {right_width}x{right_height})")]
    DimensionMismatch {
        context: &'static str,
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    /// An operation that requires a single channel got a multi-channel image.
    #[error("{context}: expected a single-channel image, got {channels} channels")]
    ChannelMismatch {
        context: &'static str,
        channels: usize,
    },

    /// A numeric argument is outside its documented range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Input data contains NaN or infinity where finite values are required.
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    /// A mask has no observed pixel, so the fidelity term is empty.
    #[error("inpainting mask has no known pixel")]
    EmptyMask,

    /// The solver produced a non-finite iterate and stopped.
    #[error("solver diverged at iteration {iteration}: non-finite values in {variable}")]
    SolverDiverged { iteration: usize, variable: &'static str },
}

pub type Result<T> = std::result::Result<T, CoreError>;
