//! Discrete curvature engine.
//!
//! Curvature at a pixel is estimated from its 3x3 neighborhood: the center
//! point of the image surface has eight nearby triangular tangent planes,
//! and the signed distance to each, divided by a squared arclength, gives
//! eight normal-curvature estimates. Their maximum and minimum act as the
//! principal curvatures, yielding mean curvature H = (k1 + k2) / 2 and
//! Gaussian curvature K = k1 * k2 per pixel.
//!
//! Patch layout used by the low-level functions: `patch[a][b]` holds
//! `u(i - 1 + a, j - 1 + b)`, i.e. row-major around the center.
//!
//! Borders replicate the nearest pixel, which keeps constant images exactly
//! flat everywhere (periodic padding would create spurious border
//! curvature).

use crate::error::{CoreError, Result};
use crate::image::Image;
use crate::scalar::Scalar;

/// Which curvature feeds the weight function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureKind {
    Mean,
    Gaussian,
}

/// Weight function g(kappa) applied to the curvature map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Total absolute curvature: 1 + alpha * |kappa|.
    Tac,
    /// Total squared curvature: 1 + alpha * kappa^2.
    Tsc,
    /// Total roto-translational variation: sqrt(1 + alpha * kappa^2).
    Trv,
    /// Plain total variation: g == 1 (alpha ignored).
    Tv,
}

/// Curvature configuration: curvature type, weight type, balance alpha and
/// grid step h (h = 1 in all reference experiments).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSpec<T> {
    pub curvature_kind: CurvatureKind,
    pub weight_kind: WeightKind,
    pub alpha: T,
    pub h: T,
    /// Intensities are divided by this before the 3x3 tangent-plane
    /// evaluation. 1 evaluates the geometry on the raw values; 255 projects
    /// native-scale images onto [0, 1], which is what the reference
    /// denoising parameter suites assume. On unprojected 0-255 data the
    /// squared intensity differences swamp the h^2 terms and every weight
    /// collapses to 1.
    pub intensity_scale: T,
}

impl<T: Scalar> CurvatureSpec<T> {
    /// Raw-intensity geometry (`intensity_scale` = 1).
    pub fn new(curvature_kind: CurvatureKind, weight_kind: WeightKind, alpha: T) -> Self {
        Self { curvature_kind, weight_kind, alpha, h: T::one(), intensity_scale: T::one() }
    }

    /// Geometry on [0, 1]-projected intensities for native 0-255 images;
    /// the convention of all reference experiment parameter sets.
    pub fn on_unit_range(curvature_kind: CurvatureKind, weight_kind: WeightKind, alpha: T) -> Self {
        Self { intensity_scale: T::from_f64_lossy(255.0), ..Self::new(curvature_kind, weight_kind, alpha) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha < T::zero() {
            return Err(CoreError::InvalidParameter {
                name: "alpha",
                reason: format!("must be nonnegative, got {}", self.alpha),
            });
        }
        if self.h.is_nan() || self.h <= T::zero() {
            return Err(CoreError::InvalidParameter {
                name: "h",
                reason: format!("must be positive, got {}", self.h),
            });
        }
        if self.intensity_scale.is_nan() || self.intensity_scale <= T::zero() {
            return Err(CoreError::InvalidParameter {
                name: "intensity_scale",
                reason: format!("must be positive, got {}", self.intensity_scale),
            });
        }
        Ok(())
    }
}

/// Per-pixel curvature values (H or K).
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureMap<T> {
    width: usize,
    height: usize,
    values: Vec<T>,
}

impl<T: Scalar> CurvatureMap<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.width + j]
    }
}

/// Per-pixel weights g(kappa); every entry is >= 1 whenever alpha >= 0,
/// which is what makes the weighted model coercive.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap<T> {
    width: usize,
    height: usize,
    values: Vec<T>,
}

impl<T: Scalar> WeightMap<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.width + j]
    }

    /// A uniform g == 1 map (the plain-TV degenerate case).
    pub fn ones(width: usize, height: usize) -> Self {
        Self { width, height, values: vec![T::one(); width * height] }
    }
}

#[inline]
fn check_patch_finite<T: Scalar>(patch: &[[T; 3]; 3]) -> Result<()> {
    for row in patch {
        for v in row {
            if !v.is_finite() {
                return Err(CoreError::NonFinite { what: "3x3 patch" });
            }
        }
    }
    Ok(())
}

/// Signed distances from the center surface point to its eight tangent
/// planes T1..T8. Each denominator contains "+4" under the root, so it is
/// at least 2 and the quotients are always well defined.
pub fn tangent_plane_distances<T: Scalar>(patch: &[[T; 3]; 3]) -> Result<[T; 8]> {
    check_patch_finite(patch)?;
    let four = T::from_f64_lossy(4.0);
    let two = T::from_f64_lossy(2.0);

    let [umm, um0, ump] = patch[0]; // u(i-1, j-1), u(i-1, j), u(i-1, j+1)
    let [u0m, u00, u0p] = patch[1]; // u(i,   j-1), u(i,   j), u(i,   j+1)
    let [upm, up0, upp] = patch[2]; // u(i+1, j-1), u(i+1, j), u(i+1, j+1)

    let sq = |v: T| v * v;

    let d1 = (two * u00 - u0m - u0p)
        / (sq(two * um0 - u0m - u0p) + sq(u0m - u0p) + four).sqrt();
    let d2 = (u0m + u0p - two * u00)
        / (sq(two * up0 - u0m - u0p) + sq(u0p - u0m) + four).sqrt();
    let d3 = (um0 + up0 - two * u00)
        / (sq(up0 - um0) + sq(um0 + up0 - two * u0m) + four).sqrt();
    let d4 = (two * u00 - um0 - up0)
        / (sq(um0 - up0) + sq(um0 + up0 - two * u0p) + four).sqrt();
    let d5 = (ump + upm - two * u00)
        / (sq(upm - umm) + sq(ump - umm) + four).sqrt();
    let d6 = (two * u00 - ump - upm)
        / (sq(ump - upp) + sq(upm - upp) + four).sqrt();
    let d7 = (two * u00 - umm - upp)
        / (sq(ump - upp) + sq(umm - ump) + four).sqrt();
    let d8 = (umm + upp - two * u00)
        / (sq(upm - umm) + sq(upp - upm) + four).sqrt();

    Ok([d1, d2, d3, d4, d5, d6, d7, d8])
}

/// The eight normal curvatures: 2 d_l over the squared arclength, where the
/// arclength runs from the center to the plane's defining neighbor u_l
/// (axial neighbors for T1..T4 with step h, diagonal ones for T5..T8 with
/// step h*sqrt(2)).
pub fn normal_curvatures<T: Scalar>(patch: &[[T; 3]; 3], h: T) -> Result<[T; 8]> {
    if h.is_nan() || h <= T::zero() {
        return Err(CoreError::InvalidParameter {
            name: "h",
            reason: format!("must be positive, got {h}"),
        });
    }
    let d = tangent_plane_distances(patch)?;

    let [umm, um0, ump] = patch[0];
    let [u0m, u00, u0p] = patch[1];
    let [upm, up0, upp] = patch[2];
    // neighbor defining each plane's arc direction
    let neighbors = [um0, up0, u0m, u0p, umm, upp, ump, upm];

    let two = T::from_f64_lossy(2.0);
    let h2 = h * h;
    let mut kappas = [T::zero(); 8];
    for (l, (dist, ul)) in d.iter().zip(neighbors).enumerate() {
        let step2 = if l < 4 { h2 } else { two * h2 };
        let du = ul - u00;
        kappas[l] = two * *dist / (du * du + step2);
    }
    Ok(kappas)
}

/// Principal curvatures and the derived mean/Gaussian curvature:
/// k1 = max, k2 = min, H = (k1 + k2) / 2, K = k1 * k2.
pub fn principal_and_hk<T: Scalar>(kappas: &[T; 8]) -> Result<(T, T, T, T)> {
    if !kappas.iter().all(|v| v.is_finite()) {
        return Err(CoreError::NonFinite { what: "normal curvatures" });
    }
    let mut kmax = kappas[0];
    let mut kmin = kappas[0];
    for &k in &kappas[1..] {
        kmax = kmax.max(k);
        kmin = kmin.min(k);
    }
    let half = T::from_f64_lossy(0.5);
    Ok((kmax, kmin, (kmax + kmin) * half, kmax * kmin))
}

#[inline]
fn clamped_patch<T: Scalar>(u: &Image<T>, i: usize, j: usize) -> [[T; 3]; 3] {
    let h = u.height();
    let w = u.width();
    let im = i.saturating_sub(1);
    let ip = (i + 1).min(h - 1);
    let jm = j.saturating_sub(1);
    let jp = (j + 1).min(w - 1);
    [
        [u.at(im, jm), u.at(im, j), u.at(im, jp)],
        [u.at(i, jm), u.at(i, j), u.at(i, jp)],
        [u.at(ip, jm), u.at(ip, j), u.at(ip, jp)],
    ]
}

/// Per-pixel curvature map (H or K per `spec.curvature_kind`) over 3x3
/// neighborhoods with replicate-padded borders. Patch intensities are
/// divided by `spec.intensity_scale` before the geometric evaluation.
pub fn curvature_map<T: Scalar>(u: &Image<T>, spec: &CurvatureSpec<T>) -> Result<CurvatureMap<T>> {
    u.ensure_single_channel("curvature_map")?;
    spec.validate()?;
    if !u.is_finite() {
        return Err(CoreError::NonFinite { what: "image" });
    }
    let (w, h) = (u.width(), u.height());
    let inv_scale = T::one() / spec.intensity_scale;
    let mut values = vec![T::zero(); w * h];
    for i in 0..h {
        for j in 0..w {
            let mut patch = clamped_patch(u, i, j);
            if spec.intensity_scale != T::one() {
                for row in patch.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= inv_scale;
                    }
                }
            }
            let kappas = normal_curvatures(&patch, spec.h)?;
            let (_, _, mean, gauss) = principal_and_hk(&kappas)?;
            values[i * w + j] = match spec.curvature_kind {
                CurvatureKind::Mean => mean,
                CurvatureKind::Gaussian => gauss,
            };
        }
    }
    Ok(CurvatureMap { width: w, height: h, values })
}

/// Applies the weight function g to a curvature map.
pub fn weight_map<T: Scalar>(kmap: &CurvatureMap<T>, spec: &CurvatureSpec<T>) -> Result<WeightMap<T>> {
    spec.validate()?;
    let alpha = spec.alpha;
    let one = T::one();
    let values = kmap
        .values
        .iter()
        .map(|&k| match spec.weight_kind {
            WeightKind::Tac => one + alpha * k.abs(),
            WeightKind::Tsc => one + alpha * k * k,
            WeightKind::Trv => (one + alpha * k * k).sqrt(),
            WeightKind::Tv => one,
        })
        .collect();
    Ok(WeightMap { width: kmap.width, height: kmap.height, values })
}
