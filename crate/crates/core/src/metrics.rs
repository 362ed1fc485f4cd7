//! Image-quality and convergence metrics: PSNR, SSIM, L1 relative errors.
//!
//! PSNR uses a fixed peak of 255 (the native scale of this toolkit) and
//! returns +infinity on identical inputs. SSIM follows the standard
//! reference construction: 11x11 Gaussian window with sigma 1.5, K1 = 0.01,
//! K2 = 0.03, dynamic range 255, mean over the valid (un-padded) window
//! positions; color images average the per-channel scores.

use crate::error::{CoreError, Result};
use crate::image::{Image, VectorField};
use crate::scalar::Scalar;

/// Summary quality report for a restored image against its reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport<T> {
    /// Peak signal-to-noise ratio in dB (+inf when MSE is zero).
    pub psnr: T,
    /// Structural similarity in [-1, 1].
    pub ssim: T,
    /// Mean squared error over all pixels and channels.
    pub mse: T,
}

/// Grids with an L1 norm, for the relative-error metric.
pub trait L1Norm<T> {
    fn l1(&self) -> T;
    fn l1_distance(&self, other: &Self) -> Result<T>;
}

impl<T: Scalar> L1Norm<T> for Image<T> {
    fn l1(&self) -> T {
        self.l1_norm()
    }

    fn l1_distance(&self, other: &Self) -> Result<T> {
        self.ensure_same_shape(other, "rel_err_l1")?;
        Ok(self
            .data()
            .iter()
            .zip(other.data())
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs()))
    }
}

impl<T: Scalar> L1Norm<T> for VectorField<T> {
    fn l1(&self) -> T {
        self.l1_norm()
    }

    fn l1_distance(&self, other: &Self) -> Result<T> {
        self.ensure_same_shape(other, "rel_err_l1")?;
        let x = self
            .x()
            .iter()
            .zip(other.x())
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs());
        Ok(self
            .y()
            .iter()
            .zip(other.y())
            .fold(x, |acc, (&a, &b)| acc + (a - b).abs()))
    }
}

/// Relative L1 error `||a - b||_1 / ||b||_1`, +inf when `||b||_1 = 0`.
pub fn rel_err_l1<T: Scalar, G: L1Norm<T>>(a: &G, b: &G) -> Result<T> {
    let diff = a.l1_distance(b)?;
    let denom = b.l1();
    if denom > T::zero() {
        Ok(diff / denom)
    } else {
        Ok(T::infinity())
    }
}

fn mse<T: Scalar>(reference: &Image<T>, test: &Image<T>) -> Result<T> {
    reference.ensure_same_shape(test, "psnr")?;
    let sum = reference
        .data()
        .iter()
        .zip(test.data())
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
    Ok(sum / T::from_usize_lossy(reference.data().len()))
}

/// Peak signal-to-noise ratio in dB with the given peak (default call sites
/// use 255). Returns +inf when the images are identical.
pub fn psnr_with_peak<T: Scalar>(reference: &Image<T>, test: &Image<T>, peak: T) -> Result<T> {
    let err = mse(reference, test)?;
    if err == T::zero() {
        return Ok(T::infinity());
    }
    let ten = T::from_f64_lossy(10.0);
    Ok(ten * (peak * peak / err).log10())
}

/// PSNR at the toolkit's fixed peak of 255.
pub fn psnr<T: Scalar>(reference: &Image<T>, test: &Image<T>) -> Result<T> {
    psnr_with_peak(reference, test, T::from_f64_lossy(255.0))
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;
const SSIM_RANGE: f64 = 255.0;

fn gaussian_window<T: Scalar>() -> [T; SSIM_WINDOW] {
    let mut w = [T::zero(); SSIM_WINDOW];
    let center = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    let mut raw = [0.0f64; SSIM_WINDOW];
    for (k, r) in raw.iter_mut().enumerate() {
        let d = k as f64 - center;
        *r = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *r;
    }
    for (k, r) in raw.iter().enumerate() {
        w[k] = T::from_f64_lossy(r / sum);
    }
    w
}

/// Separable Gaussian filter, valid region only: output is
/// (height - 10) x (width - 10).
fn filter_valid<T: Scalar>(data: &[T], width: usize, height: usize) -> Vec<T> {
    let window = gaussian_window::<T>();
    let out_w = width - SSIM_WINDOW + 1;
    let out_h = height - SSIM_WINDOW + 1;
    // horizontal pass
    let mut horiz = vec![T::zero(); out_w * height];
    for i in 0..height {
        for j in 0..out_w {
            let mut acc = T::zero();
            for (k, &wk) in window.iter().enumerate() {
                acc += wk * data[i * width + j + k];
            }
            horiz[i * out_w + j] = acc;
        }
    }
    // vertical pass
    let mut out = vec![T::zero(); out_w * out_h];
    for i in 0..out_h {
        for j in 0..out_w {
            let mut acc = T::zero();
            for (k, &wk) in window.iter().enumerate() {
                acc += wk * horiz[(i + k) * out_w + j];
            }
            out[i * out_w + j] = acc;
        }
    }
    out
}

fn ssim_plane<T: Scalar>(reference: &[T], test: &[T], width: usize, height: usize) -> T {
    let c1 = T::from_f64_lossy((SSIM_K1 * SSIM_RANGE) * (SSIM_K1 * SSIM_RANGE));
    let c2 = T::from_f64_lossy((SSIM_K2 * SSIM_RANGE) * (SSIM_K2 * SSIM_RANGE));
    let two = T::from_f64_lossy(2.0);

    let sq_ref: Vec<T> = reference.iter().map(|&v| v * v).collect();
    let sq_test: Vec<T> = test.iter().map(|&v| v * v).collect();
    let cross: Vec<T> = reference.iter().zip(test).map(|(&a, &b)| a * b).collect();

    let mu_ref = filter_valid(reference, width, height);
    let mu_test = filter_valid(test, width, height);
    let m_sq_ref = filter_valid(&sq_ref, width, height);
    let m_sq_test = filter_valid(&sq_test, width, height);
    let m_cross = filter_valid(&cross, width, height);

    let mut total = T::zero();
    for idx in 0..mu_ref.len() {
        let (ma, mb) = (mu_ref[idx], mu_test[idx]);
        let var_a = m_sq_ref[idx] - ma * ma;
        let var_b = m_sq_test[idx] - mb * mb;
        let cov = m_cross[idx] - ma * mb;
        let value = ((two * ma * mb + c1) * (two * cov + c2))
            / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
        total += value;
    }
    total / T::from_usize_lossy(mu_ref.len())
}

/// Mean local SSIM between two images; color inputs are scored per channel
/// and averaged.
pub fn ssim<T: Scalar>(reference: &Image<T>, test: &Image<T>) -> Result<T> {
    reference.ensure_same_shape(test, "ssim")?;
    if reference.width() < SSIM_WINDOW || reference.height() < SSIM_WINDOW {
        return Err(CoreError::InvalidParameter {
            name: "image",
            reason: format!(
                "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {}x{}",
                reference.width(),
                reference.height()
            ),
        });
    }
    let plane = reference.pixel_count();
    let mut total = T::zero();
    for c in 0..reference.channels() {
        total += ssim_plane(
            &reference.data()[c * plane..(c + 1) * plane],
            &test.data()[c * plane..(c + 1) * plane],
            reference.width(),
            reference.height(),
        );
    }
    Ok(total / T::from_usize_lossy(reference.channels()))
}

/// PSNR, SSIM and MSE in one pass.
pub fn report<T: Scalar>(reference: &Image<T>, test: &Image<T>) -> Result<MetricReport<T>> {
    Ok(MetricReport {
        psnr: psnr(reference, test)?,
        ssim: ssim(reference, test)?,
        mse: mse(reference, test)?,
    })
}
