//! Screened-Poisson solves under periodic boundaries.
//!
//! `(a I - b Laplacian) u = rhs` is diagonal in the Fourier basis: forward
//! transform, divide pointwise by `a - b * symbol`, inverse transform. The
//! symbol is the [`laplacian_symbol`] of the 5-point periodic Laplacian, so
//! the denominator is at least `a` everywhere and never vanishes for a > 0.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{CoreError, Result};
use crate::image::{laplacian_symbol, Image};
use crate::scalar::Scalar;

/// Cached FFT plans and scratch space for one grid size.
pub struct SpectralSolver<T: Scalar> {
    width: usize,
    height: usize,
    symbol: Vec<T>,
    row_fwd: Arc<dyn Fft<T>>,
    row_inv: Arc<dyn Fft<T>>,
    col_fwd: Arc<dyn Fft<T>>,
    col_inv: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
    transposed: Vec<Complex<T>>,
}

impl<T: Scalar> SpectralSolver<T> {
    pub fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft(width, FftDirection::Forward);
        let row_inv = planner.plan_fft(width, FftDirection::Inverse);
        let col_fwd = planner.plan_fft(height, FftDirection::Forward);
        let col_inv = planner.plan_fft(height, FftDirection::Inverse);
        let scratch_len = row_fwd
            .get_inplace_scratch_len()
            .max(row_inv.get_inplace_scratch_len())
            .max(col_fwd.get_inplace_scratch_len())
            .max(col_inv.get_inplace_scratch_len());
        let zero = Complex::new(T::zero(), T::zero());
        Self {
            width,
            height,
            symbol: laplacian_symbol(width, height),
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            scratch: vec![zero; scratch_len],
            transposed: vec![zero; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn fft2(&mut self, buffer: &mut [Complex<T>], direction: FftDirection) {
        let (w, h) = (self.width, self.height);
        let row_fft = match direction {
            FftDirection::Forward => &self.row_fwd,
            FftDirection::Inverse => &self.row_inv,
        };
        for row in buffer.chunks_exact_mut(w) {
            row_fft.process_with_scratch(row, &mut self.scratch);
        }

        transpose(w, h, buffer, &mut self.transposed);
        let col_fft = match direction {
            FftDirection::Forward => &self.col_fwd,
            FftDirection::Inverse => &self.col_inv,
        };
        for col in self.transposed.chunks_exact_mut(h) {
            col_fft.process_with_scratch(col, &mut self.scratch);
        }
        transpose(h, w, &self.transposed, buffer);
    }

    /// Solves `(a I - b Laplacian) u = rhs` to spectral accuracy.
    pub fn solve(&mut self, a: T, b: T, rhs: &Image<T>) -> Result<Image<T>> {
        if a.is_nan() || a <= T::zero() {
            return Err(CoreError::InvalidParameter {
                name: "a",
                reason: format!("screened solve requires a > 0, got {a}"),
            });
        }
        if b < T::zero() {
            return Err(CoreError::InvalidParameter {
                name: "b",
                reason: format!("screened solve requires b >= 0, got {b}"),
            });
        }
        rhs.ensure_single_channel("spectral_solve")?;
        if rhs.width() != self.width || rhs.height() != self.height {
            return Err(CoreError::DimensionMismatch {
                context: "spectral_solve",
                left_width: self.width,
                left_height: self.height,
                right_width: rhs.width(),
                right_height: rhs.height(),
            });
        }

        let mut buffer: Vec<Complex<T>> = rhs
            .data()
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect();
        self.fft2(&mut buffer, FftDirection::Forward);
        for (value, &sym) in buffer.iter_mut().zip(&self.symbol) {
            let denom = a - b * sym;
            *value = Complex::new(value.re / denom, value.im / denom);
        }
        self.fft2(&mut buffer, FftDirection::Inverse);

        let scale = T::one() / T::from_usize_lossy(self.width * self.height);
        let data = buffer.iter().map(|c| c.re * scale).collect();
        Image::new(self.width, self.height, 1, data)
    }
}

fn transpose<T: Copy>(width: usize, height: usize, src: &[Complex<T>], dst: &mut [Complex<T>]) {
    for i in 0..height {
        let row = i * width;
        for j in 0..width {
            dst[j * height + i] = src[row + j];
        }
    }
}

/// One-shot screened solve; plans are built per call, so prefer
/// [`SpectralSolver`] inside iteration loops.
pub fn spectral_solve<T: Scalar>(a: T, b: T, rhs: &Image<T>) -> Result<Image<T>> {
    SpectralSolver::new(rhs.width(), rhs.height()).solve(a, b, rhs)
}
