//! Synthetic degradation: Gaussian, salt-and-pepper and Poisson noise.
//!
//! All generators are deterministic for a fixed seed: samples are drawn from
//! a single `StdRng` stream in row-major order, so equal seeds give
//! bit-identical outputs.

use rand::{rngs::StdRng, SeedableRng};
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{CoreError, Result};
use crate::image::Image;
use crate::scalar::Scalar;

/// Noise model applied on the native 0-255 intensity scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel<T> {
    /// Additive i.i.d. N(0, sigma^2) on every sample.
    Gaussian { sigma: T },
    /// Replaces exactly `floor(fraction * pixel_count)` distinct pixels,
    /// split as evenly as possible between the intensity extremes 0 and 255.
    SaltPepper { fraction: T },
    /// Each sample drawn from Poisson(u) on the native scale.
    Poisson,
}

/// Intensity extremes used by the salt-and-pepper model.
const PEPPER: f64 = 0.0;
const SALT: f64 = 255.0;

/// Applies `model` to `u`, deterministically for a fixed `seed`.
pub fn add_noise<T: Scalar>(u: &Image<T>, model: NoiseModel<T>, seed: u64) -> Result<Image<T>> {
    match model {
        NoiseModel::Gaussian { sigma } => {
            if sigma < T::zero() {
                return Err(CoreError::InvalidParameter {
                    name: "sigma",
                    reason: format!("must be nonnegative, got {sigma}"),
                });
            }
            if sigma == T::zero() {
                return Ok(u.clone());
            }
            let mut rng = StdRng::seed_from_u64(seed);
            let normal = Normal::new(0.0f64, sigma.to_f64().unwrap()).expect("finite sigma");
            let mut out = u.clone();
            for v in out.data_mut() {
                *v += T::from_f64_lossy(normal.sample(&mut rng));
            }
            Ok(out)
        }
        NoiseModel::SaltPepper { fraction } => {
            if fraction < T::zero() || fraction > T::one() {
                return Err(CoreError::InvalidParameter {
                    name: "fraction",
                    reason: format!("must lie in [0, 1], got {fraction}"),
                });
            }
            let n = u.pixel_count();
            let count = (fraction.to_f64().unwrap() * n as f64).floor() as usize;
            let mut rng = StdRng::seed_from_u64(seed);
            let picked = rand::seq::index::sample(&mut rng, n, count);
            let mut out = u.clone();
            let channels = out.channels();
            let plane = n;
            for (k, pixel) in picked.into_iter().enumerate() {
                // alternate salt/pepper for an even split (salt gets the odd one)
                let value = if k % 2 == 0 { SALT } else { PEPPER };
                for c in 0..channels {
                    out.data_mut()[c * plane + pixel] = T::from_f64_lossy(value);
                }
            }
            Ok(out)
        }
        NoiseModel::Poisson => {
            if u.data().iter().any(|&v| v < T::zero()) {
                return Err(CoreError::InvalidParameter {
                    name: "intensity",
                    reason: "Poisson noise requires nonnegative intensities".into(),
                });
            }
            let mut rng = StdRng::seed_from_u64(seed);
            let mut out = u.clone();
            for v in out.data_mut() {
                let mean = v.to_f64().unwrap();
                if mean > 0.0 {
                    let poisson = Poisson::new(mean).expect("positive finite mean");
                    *v = T::from_f64_lossy(poisson.sample(&mut rng));
                }
                // Poisson(0) is identically zero; leave the sample untouched
            }
            Ok(out)
        }
    }
}
