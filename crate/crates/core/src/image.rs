//! Grid containers and the discrete differential operators.
//!
//! Index convention, used everywhere in this crate: `i` indexes rows
//! (0..height), `j` indexes columns (0..width). Single-channel samples live
//! at `data[i * width + j]`; multi-channel images are stored planar, channel
//! `c` occupying `data[c * width * height ..][.. width * height]`.
//!
//! The discrete gradient uses forward differences with periodic wrap-around:
//! the x-component differences along `i`, the y-component along `j`. The
//! divergence below is its negative adjoint (backward differences with the
//! same wrap), so `divergence(gradient_forward(u))` is the 5-point periodic
//! Laplacian whose Fourier multiplier [`laplacian_symbol`] returns.

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// Real-valued intensity grid on the native 0-255 scale, 1 or 3 channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Scalar> Image<T> {
    /// Builds an image, validating dimensions, channel count and finiteness.
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(CoreError::InvalidParameter {
                name: "dimensions",
                reason: format!("width and height must be positive, got {width}x{height}"),
            });
        }
        if channels != 1 && channels != 3 {
            return Err(CoreError::ChannelMismatch { context: "Image::new", channels });
        }
        if data.len() != width * height * channels {
            return Err(CoreError::InvalidParameter {
                name: "data",
                reason: format!(
                    "expected {} samples for {width}x{height}x{channels}, got {}",
                    width * height * channels,
                    data.len()
                ),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(CoreError::NonFinite { what: "image data" });
        }
        Ok(Self { width, height, channels, data })
    }

    /// Single-channel zero image.
    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, channels: 1, data: vec![T::zero(); width * height] }
    }

    /// Single-channel image filled with `value`.
    pub fn constant(width: usize, height: usize, value: T) -> Self {
        Self { width, height, channels: 1, data: vec![value; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Sample at row `i`, column `j` of a single-channel image.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        debug_assert_eq!(self.channels, 1);
        self.data[i * self.width + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        debug_assert_eq!(self.channels, 1);
        self.data[i * self.width + j] = value;
    }

    /// Extracts channel `c` as a single-channel image.
    pub fn channel(&self, c: usize) -> Image<T> {
        assert!(c < self.channels, "channel {c} out of range");
        let plane = self.width * self.height;
        Image {
            width: self.width,
            height: self.height,
            channels: 1,
            data: self.data[c * plane..(c + 1) * plane].to_vec(),
        }
    }

    /// Reassembles single-channel planes into one multi-channel image.
    pub fn from_channels(planes: &[Image<T>]) -> Result<Self> {
        let first = planes.first().ok_or(CoreError::InvalidParameter {
            name: "planes",
            reason: "no channels given".into(),
        })?;
        if planes.len() != 1 && planes.len() != 3 {
            return Err(CoreError::ChannelMismatch {
                context: "Image::from_channels",
                channels: planes.len(),
            });
        }
        let mut data = Vec::with_capacity(first.pixel_count() * planes.len());
        for plane in planes {
            if plane.width != first.width || plane.height != first.height || plane.channels != 1 {
                return Err(CoreError::DimensionMismatch {
                    context: "Image::from_channels",
                    left_width: first.width,
                    left_height: first.height,
                    right_width: plane.width,
                    right_height: plane.height,
                });
            }
            data.extend_from_slice(&plane.data);
        }
        Ok(Self { width: first.width, height: first.height, channels: planes.len(), data })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Sum of absolute samples.
    pub fn l1_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc + v.abs())
    }

    /// Euclidean norm of all samples.
    pub fn l2_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt()
    }

    pub(crate) fn ensure_single_channel(&self, context: &'static str) -> Result<()> {
        if self.channels != 1 {
            return Err(CoreError::ChannelMismatch { context, channels: self.channels });
        }
        Ok(())
    }

    pub(crate) fn ensure_same_shape(&self, other: &Image<T>, context: &'static str) -> Result<()> {
        if self.width != other.width || self.height != other.height || self.channels != other.channels {
            return Err(CoreError::DimensionMismatch {
                context,
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            });
        }
        Ok(())
    }
}

/// Per-pixel 2-vector grid; houses the splitting variable v and the
/// multiplier field, as well as image gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<T> {
    width: usize,
    height: usize,
    x: Vec<T>,
    y: Vec<T>,
}

impl<T: Scalar> VectorField<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, x: vec![T::zero(); width * height], y: vec![T::zero(); width * height] }
    }

    /// Builds a field from its two component grids.
    pub fn new(width: usize, height: usize, x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != width * height || y.len() != x.len() {
            return Err(CoreError::DimensionMismatch {
                context: "VectorField::new",
                left_width: width,
                left_height: height,
                right_width: x.len(),
                right_height: y.len(),
            });
        }
        if !x.iter().chain(y.iter()).all(|v| v.is_finite()) {
            return Err(CoreError::NonFinite { what: "vector field" });
        }
        Ok(Self { width, height, x, y })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn x_mut(&mut self) -> &mut [T] {
        &mut self.x
    }

    pub fn y_mut(&mut self) -> &mut [T] {
        &mut self.y
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> (T, T) {
        let idx = i * self.width + j;
        (self.x[idx], self.y[idx])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: (T, T)) {
        let idx = i * self.width + j;
        self.x[idx] = value.0;
        self.y[idx] = value.1;
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.y.iter()).all(|v| v.is_finite())
    }

    /// Sum of absolute entries over both components.
    pub fn l1_norm(&self) -> T {
        self.x
            .iter()
            .chain(self.y.iter())
            .fold(T::zero(), |acc, v| acc + v.abs())
    }

    pub fn l2_norm(&self) -> T {
        self.x
            .iter()
            .chain(self.y.iter())
            .fold(T::zero(), |acc, v| acc + *v * *v)
            .sqrt()
    }

    pub(crate) fn ensure_same_shape(&self, other: &VectorField<T>, context: &'static str) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(CoreError::DimensionMismatch {
                context,
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            });
        }
        Ok(())
    }
}

/// Observation mask for inpainting: `true` marks pixels with data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InpaintMask {
    width: usize,
    height: usize,
    known: Vec<bool>,
}

impl InpaintMask {
    pub fn new(width: usize, height: usize, known: Vec<bool>) -> Result<Self> {
        if known.len() != width * height {
            return Err(CoreError::InvalidParameter {
                name: "known",
                reason: format!("expected {} entries, got {}", width * height, known.len()),
            });
        }
        if !known.iter().any(|&k| k) {
            return Err(CoreError::EmptyMask);
        }
        Ok(Self { width, height, known })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn known(&self) -> &[bool] {
        &self.known
    }

    #[inline]
    pub fn is_known(&self, i: usize, j: usize) -> bool {
        self.known[i * self.width + j]
    }

    pub fn known_count(&self) -> usize {
        self.known.iter().filter(|&&k| k).count()
    }
}

/// Forward-difference gradient with periodic wrap at the last row/column.
///
/// The x-component at (i, j) is `u(i+1, j) - u(i, j)` with `i+1` taken modulo
/// the height; the y-component differences along `j` the same way.
pub fn gradient_forward<T: Scalar>(u: &Image<T>) -> Result<VectorField<T>> {
    u.ensure_single_channel("gradient_forward")?;
    let (w, h) = (u.width(), u.height());
    let mut field = VectorField::zeros(w, h);
    for i in 0..h {
        let inext = if i + 1 == h { 0 } else { i + 1 };
        for j in 0..w {
            let jnext = if j + 1 == w { 0 } else { j + 1 };
            let c = u.at(i, j);
            field.set(i, j, (u.at(inext, j) - c, u.at(i, jnext) - c));
        }
    }
    Ok(field)
}

/// Discrete divergence: the negative adjoint of [`gradient_forward`],
/// i.e. the unique operator with `<grad u, p> = -<u, div p>` for all `u`.
pub fn divergence<T: Scalar>(p: &VectorField<T>) -> Result<Image<T>> {
    if !p.is_finite() {
        return Err(CoreError::NonFinite { what: "vector field" });
    }
    let (w, h) = (p.width(), p.height());
    let mut out = Image::zeros(w, h);
    for i in 0..h {
        let iprev = if i == 0 { h - 1 } else { i - 1 };
        for j in 0..w {
            let jprev = if j == 0 { w - 1 } else { j - 1 };
            let (px, _) = p.at(i, j);
            let (px_up, _) = p.at(iprev, j);
            let (_, py) = p.at(i, j);
            let (_, py_left) = p.at(i, jprev);
            out.set(i, j, px - px_up + py - py_left);
        }
    }
    Ok(out)
}

/// Eigenvalues of the periodic 5-point Laplacian `div(grad(.))`, laid out as
/// a height x width grid: entry (p, q) is
/// `2 cos(2 pi p / height) + 2 cos(2 pi q / width) - 4`.
///
/// All entries are <= 0, with 0 only at the constant mode (0, 0).
pub fn laplacian_symbol<T: Scalar>(width: usize, height: usize) -> Vec<T> {
    let two = T::from_f64_lossy(2.0);
    let four = T::from_f64_lossy(4.0);
    let tau = T::from_f64_lossy(std::f64::consts::TAU);
    let mut symbol = vec![T::zero(); width * height];
    for p in 0..height {
        let cp = (tau * T::from_usize_lossy(p) / T::from_usize_lossy(height)).cos();
        for q in 0..width {
            let cq = (tau * T::from_usize_lossy(q) / T::from_usize_lossy(width)).cos();
            symbol[p * width + q] = two * cp + two * cq - four;
        }
    }
    symbol
}

/// Inner product of two grids, used by adjointness tests.
pub fn inner_product_images<T: Scalar>(a: &Image<T>, b: &Image<T>) -> T {
    debug_assert_eq!(a.data().len(), b.data().len());
    a.data()
        .iter()
        .zip(b.data())
        .fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Inner product of two vector fields (sum over both components).
pub fn inner_product_fields<T: Scalar>(a: &VectorField<T>, b: &VectorField<T>) -> T {
    let xy = a.x().iter().zip(b.x()).fold(T::zero(), |acc, (x, y)| acc + *x * *y);
    a.y().iter().zip(b.y()).fold(xy, |acc, (x, y)| acc + *x * *y)
}
