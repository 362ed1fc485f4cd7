//! Deterministic synthetic inputs for experiments, benchmarks and tests.

use rand::{rngs::StdRng, SeedableRng};

use crate::error::Result;
use crate::image::{Image, InpaintMask};
use crate::scalar::Scalar;

/// Piecewise-constant test scene: a rectangle, a disk and a triangle over a
/// flat background, giving straight edges, corners and a curved boundary.
/// Purely a function of the requested size.
pub fn shapes<T: Scalar>(width: usize, height: usize) -> Image<T> {
    let mut img = Image::constant(width, height, T::from_f64_lossy(40.0));
    let wf = width as f64;
    let hf = height as f64;

    let rect_i = (0.12 * hf) as usize..(0.45 * hf) as usize;
    let rect_j = (0.10 * wf) as usize..(0.40 * wf) as usize;

    let disk_ci = 0.38 * hf;
    let disk_cj = 0.68 * wf;
    let disk_r = 0.20 * wf.min(hf);

    // triangle vertices (row, col)
    let t0 = (0.58 * hf, 0.18 * wf);
    let t1 = (0.90 * hf, 0.40 * wf);
    let t2 = (0.60 * hf, 0.62 * wf);
    let edge = |a: (f64, f64), b: (f64, f64), p: (f64, f64)| {
        (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
    };

    for i in 0..height {
        for j in 0..width {
            let p = (i as f64, j as f64);
            if rect_i.contains(&i) && rect_j.contains(&j) {
                img.set(i, j, T::from_f64_lossy(220.0));
            }
            let di = p.0 - disk_ci;
            let dj = p.1 - disk_cj;
            if di * di + dj * dj <= disk_r * disk_r {
                img.set(i, j, T::from_f64_lossy(150.0));
            }
            let (e0, e1, e2) = (edge(t0, t1, p), edge(t1, t2, p), edge(t2, t0, p));
            if (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) || (e0 <= 0.0 && e1 <= 0.0 && e2 <= 0.0) {
                img.set(i, j, T::from_f64_lossy(90.0));
            }
        }
    }
    img
}

/// Planar ramp u(i, j) = i, handy for zero-curvature calibration.
pub fn ramp<T: Scalar>(width: usize, height: usize) -> Image<T> {
    let mut img = Image::zeros(width, height);
    for i in 0..height {
        for j in 0..width {
            img.set(i, j, T::from_usize_lossy(i));
        }
    }
    img
}

/// Mask with exactly `floor(fraction * N)` missing pixels drawn without
/// replacement; deterministic for a fixed seed.
pub fn random_missing_mask(width: usize, height: usize, fraction: f64, seed: u64) -> Result<InpaintMask> {
    let n = width * height;
    let missing = (fraction * n as f64).floor() as usize;
    let mut rng = StdRng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, n, missing.min(n));
    let mut known = vec![true; n];
    for idx in picked {
        known[idx] = false;
    }
    InpaintMask::new(width, height, known)
}
