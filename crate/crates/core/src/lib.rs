//! Image reconstruction by curvature-weighted total-variation minimization.
//!
//! Mean and Gaussian curvature are estimated per pixel from 3x3 tangent-plane
//! geometry and turned into total-variation weights; the resulting
//! re-weighted TV model is solved with a proximal ADMM whose u-step is a
//! single FFT-based screened-Poisson solve per iteration. Gaussian, impulse
//! and Poisson noise models, inpainting and per-channel color restoration
//! are supported, together with PSNR/SSIM quality metrics and synthetic
//! degradation for experiments.
//!
//! All numeric kernels are generic over the [`Scalar`] type (`f32` or
//! `f64`); the `*F64`/`*F32` aliases below pick a concrete precision.
//! Intensities stay on the native 0-255 scale in floating point throughout;
//! quantization is the concern of the I/O layer.

pub mod curvature;
pub mod error;
pub mod image;
pub mod metrics;
pub mod noise;
pub mod scalar;
pub mod solver;
pub mod synth;

pub use crate::error::{CoreError, Result};
pub use crate::scalar::Scalar;

pub use crate::curvature::{CurvatureKind, CurvatureSpec, WeightKind};
pub use crate::image::{Image, InpaintMask, VectorField};
pub use crate::noise::NoiseModel;
pub use crate::solver::{Fidelity, SolveResult, SolverConfig};

/// Double-precision aliases, the default choice.
pub type ImageF64 = Image<f64>;
pub type VectorFieldF64 = VectorField<f64>;
pub type CurvatureMapF64 = curvature::CurvatureMap<f64>;
pub type WeightMapF64 = curvature::WeightMap<f64>;
pub type CurvatureSpecF64 = CurvatureSpec<f64>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type SolveResultF64 = SolveResult<f64>;

/// Single-precision aliases.
pub type ImageF32 = Image<f32>;
pub type VectorFieldF32 = VectorField<f32>;
pub type CurvatureSpecF32 = CurvatureSpec<f32>;
pub type SolverConfigF32 = SolverConfig<f32>;
