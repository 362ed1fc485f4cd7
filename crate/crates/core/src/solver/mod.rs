//! Proximal ADMM for the curvature-weighted TV model.
//!
//! The unconstrained model
//! `min_u  sum g(kappa(u)) |grad u| + fidelity(u, f)`
//! is split with v = grad u and solved by alternating:
//!
//! 1. u-solve: a screened-Poisson system, diagonal under the FFT;
//! 2. curvature/weight refresh from the new u;
//! 3. v-solve: per-pixel vector shrinkage with the per-pixel weights;
//! 4. multiplier ascent;
//! 5. stop when the relative L1 change of u falls below the tolerance.
//!
//! Gaussian noise uses the quadratic fidelity directly. Impulse (L1),
//! Poisson (Kullback-Leibler) and inpainting fidelities introduce a second
//! split variable w with its own penalty `mu2` and scaled multiplier, which
//! keeps the u-solve spectral; their closed-form w-updates live in this
//! module and are unit-tested against stationarity oracles.
//!
//! Proximal weights tau (on u) and sigma (on v) are supported and default
//! to zero, matching the reference experiments.

mod spectral;

pub use spectral::{spectral_solve, SpectralSolver};

use std::time::Instant;

use crate::curvature::{
    curvature_map, weight_map, CurvatureMap, CurvatureSpec, WeightKind, WeightMap,
};
use crate::error::{CoreError, Result};
use crate::image::{divergence, gradient_forward, Image, InpaintMask, VectorField};
use crate::scalar::Scalar;

/// Data-fidelity term of the model.
#[derive(Debug, Clone, PartialEq)]
pub enum Fidelity {
    /// (lambda/2) ||u - f||^2 — Gaussian noise.
    L2,
    /// lambda ||u - f||_1 — impulse (salt-and-pepper) noise.
    L1,
    /// lambda sum(u - f log u) — Poisson noise, Kullback-Leibler divergence.
    Kl,
    /// (lambda/2) ||u - f||^2 restricted to the observed pixels.
    Inpaint(InpaintMask),
}

impl Fidelity {
    fn needs_split(&self) -> bool {
        !matches!(self, Fidelity::L2)
    }
}

/// All tunables of the ADMM solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Fidelity weight lambda.
    pub lambda: T,
    /// Penalty mu for the gradient split v = grad u (mu1 in two-split runs).
    pub mu: T,
    /// Penalty mu2 for the fidelity split w; required unless fidelity is L2.
    pub mu2: Option<T>,
    /// Proximal weight on u (default 0).
    pub tau: T,
    /// Proximal weight on v (default 0).
    pub sigma: T,
    /// Iteration cap T_max.
    pub max_iter: usize,
    /// Relative-change stopping threshold epsilon.
    pub tol: T,
    pub curvature: CurvatureSpec<T>,
    pub fidelity: Fidelity,
    /// Retain per-iteration (v, kappa) history and report the Delta_k
    /// diagnostic; costs O(N) memory per iteration.
    pub track_delta_k: bool,
}

impl<T: Scalar> SolverConfig<T> {
    /// Gaussian-noise configuration with the reference defaults
    /// (tau = sigma = 0, T_max = 300, tol = 1e-4).
    pub fn l2(lambda: T, mu: T, curvature: CurvatureSpec<T>) -> Self {
        Self {
            lambda,
            mu,
            mu2: None,
            tau: T::zero(),
            sigma: T::zero(),
            max_iter: 300,
            tol: T::from_f64_lossy(1e-4),
            curvature,
            fidelity: Fidelity::L2,
            track_delta_k: false,
        }
    }

    /// Impulse-noise configuration (L1 fidelity, split penalty mu2).
    pub fn l1(lambda: T, mu: T, mu2: T, curvature: CurvatureSpec<T>) -> Self {
        Self { mu2: Some(mu2), fidelity: Fidelity::L1, ..Self::l2(lambda, mu, curvature) }
    }

    /// Poisson-noise configuration (KL fidelity, split penalty mu2).
    pub fn kl(lambda: T, mu: T, mu2: T, curvature: CurvatureSpec<T>) -> Self {
        Self { mu2: Some(mu2), fidelity: Fidelity::Kl, ..Self::l2(lambda, mu, curvature) }
    }

    /// Inpainting configuration (masked quadratic fidelity).
    pub fn inpaint(lambda: T, mu: T, mu2: T, mask: InpaintMask, curvature: CurvatureSpec<T>) -> Self {
        Self {
            mu2: Some(mu2),
            fidelity: Fidelity::Inpaint(mask),
            ..Self::l2(lambda, mu, curvature)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.is_nan() || self.lambda <= T::zero() {
            return Err(CoreError::InvalidParameter {
                name: "lambda",
                reason: format!("must be positive, got {}", self.lambda),
            });
        }
        if self.mu.is_nan() || self.mu <= T::zero() {
            return Err(CoreError::InvalidParameter {
                name: "mu",
                reason: format!("must be positive, got {}", self.mu),
            });
        }
        if self.tau < T::zero() || self.sigma < T::zero() {
            return Err(CoreError::InvalidParameter {
                name: "tau/sigma",
                reason: "proximal weights must be nonnegative".into(),
            });
        }
        if self.max_iter == 0 {
            return Err(CoreError::InvalidParameter {
                name: "max_iter",
                reason: "must be at least 1".into(),
            });
        }
        if self.tol.is_nan() || self.tol <= T::zero() {
            return Err(CoreError::InvalidParameter {
                name: "tol",
                reason: format!("must be positive, got {}", self.tol),
            });
        }
        self.curvature.validate()?;
        if self.fidelity.needs_split() {
            match self.mu2 {
                Some(m) if m > T::zero() => {}
                _ => {
                    return Err(CoreError::InvalidParameter {
                        name: "mu2",
                        reason: "required and positive for l1/kl/inpaint fidelities".into(),
                    })
                }
            }
        }
        Ok(())
    }

    fn mu2_value(&self) -> T {
        self.mu2.expect("validated config has mu2")
    }
}

/// Diagnostics for one completed iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    /// Model energy E(u^k): weights from the previous iterate, gradient and
    /// fidelity from the current one.
    pub energy: T,
    /// L1 residual ||v^k - grad u^k||_1.
    pub residual_l1: T,
    /// ||u^k - u^{k-1}||_1 / ||u^{k-1}||_1 (+inf when the denominator is 0).
    pub rel_err_u: T,
    /// Same for the multiplier; +inf at the first iteration since
    /// the multiplier starts at zero.
    pub rel_err_lambda: T,
    /// Delta_k diagnostic, filled post-hoc when tracking is on.
    pub delta_k: Option<T>,
    /// Wall time of the iteration in milliseconds.
    pub time_ms: f64,
}

/// Per-iteration diagnostics of one solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace<T> {
    pub records: Vec<IterationRecord<T>>,
}

impl<T: Scalar> IterationTrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Renders the trace in its on-disk format: comma-separated, one header
    /// row, columns exactly `iter,energy,residual_l1,rel_err_u,
    /// rel_err_lambda,delta_k,time_ms`; `delta_k` is blank when untracked.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,energy,residual_l1,rel_err_u,rel_err_lambda,delta_k,time_ms\n");
        for (k, r) in self.records.iter().enumerate() {
            let delta = r.delta_k.map(|d| d.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                k + 1,
                r.energy,
                r.residual_l1,
                r.rel_err_u,
                r.rel_err_lambda,
                delta,
                r.time_ms
            ));
        }
        out
    }
}

/// Output of a single-channel solve.
#[derive(Debug, Clone)]
pub struct SolveResult<T> {
    pub restored: Image<T>,
    pub trace: IterationTrace<T>,
    pub iterations_used: usize,
    /// True iff the relative-change criterion held at the final iteration.
    pub converged: bool,
    /// Per-iteration (v, kappa) history, kept when `track_delta_k` is set;
    /// feed it to [`delta_k_diagnostic`] to evaluate Delta_k against a
    /// reference of your choice.
    pub delta_history: Option<Vec<(VectorField<T>, CurvatureMap<T>)>>,
}

/// Output of a per-channel color solve.
#[derive(Debug, Clone)]
pub struct ColorSolveResult<T> {
    pub restored: Image<T>,
    pub per_channel: Vec<SolveResult<T>>,
}

impl<T: Scalar> ColorSolveResult<T> {
    pub fn converged(&self) -> bool {
        self.per_channel.iter().all(|r| r.converged)
    }

    pub fn iterations_used(&self) -> usize {
        self.per_channel.iter().map(|r| r.iterations_used).max().unwrap_or(0)
    }
}

/// Scalar soft threshold: sign(x) * max(|x| - t, 0).
#[inline]
pub fn shrink_scalar<T: Scalar>(x: T, threshold: T) -> T {
    let mag = x.abs() - threshold;
    if mag > T::zero() {
        mag * x.signum()
    } else {
        T::zero()
    }
}

/// Per-pixel Euclidean-norm soft threshold of a 2-vector field; the
/// degenerate 0/0 case at the origin returns the zero vector.
#[allow(clippy::needless_range_loop)]
pub fn shrink<T: Scalar>(field: &VectorField<T>, thresholds: &[T]) -> Result<VectorField<T>> {
    if thresholds.len() != field.x().len() {
        return Err(CoreError::DimensionMismatch {
            context: "shrink",
            left_width: field.width(),
            left_height: field.height(),
            right_width: thresholds.len(),
            right_height: 1,
        });
    }
    if thresholds.iter().any(|&t| t < T::zero()) {
        return Err(CoreError::InvalidParameter {
            name: "threshold",
            reason: "shrink thresholds must be nonnegative".into(),
        });
    }
    let mut out = VectorField::zeros(field.width(), field.height());
    for idx in 0..thresholds.len() {
        let (x, y) = (field.x()[idx], field.y()[idx]);
        let norm = (x * x + y * y).sqrt();
        if norm > thresholds[idx] {
            let scale = (norm - thresholds[idx]) / norm;
            out.x_mut()[idx] = x * scale;
            out.y_mut()[idx] = y * scale;
        }
    }
    Ok(out)
}

/// Right-hand side of the screened u-system shared by all fidelities:
/// `pull + tau * u_prev - div(mu * v + lambda_mult)`.
fn u_rhs<T: Scalar>(
    pull: &Image<T>,
    u_prev: &Image<T>,
    v: &VectorField<T>,
    lambda_mult: &VectorField<T>,
    mu: T,
    tau: T,
) -> Result<Image<T>> {
    let mut combined = VectorField::zeros(v.width(), v.height());
    for idx in 0..combined.x().len() {
        combined.x_mut()[idx] = mu * v.x()[idx] + lambda_mult.x()[idx];
        combined.y_mut()[idx] = mu * v.y()[idx] + lambda_mult.y()[idx];
    }
    let div = divergence(&combined)?;
    let mut rhs = Image::zeros(pull.width(), pull.height());
    for idx in 0..rhs.data().len() {
        rhs.data_mut()[idx] = pull.data()[idx] + tau * u_prev.data()[idx] - div.data()[idx];
    }
    Ok(rhs)
}

/// Quadratic-fidelity u-update: solves
/// `((lambda + tau) I - mu Laplacian) u = lambda f + tau u_prev - div(mu v + Lambda)`.
pub fn update_u_l2<T: Scalar>(
    f: &Image<T>,
    v: &VectorField<T>,
    lambda_mult: &VectorField<T>,
    u_prev: &Image<T>,
    cfg: &SolverConfig<T>,
) -> Result<Image<T>> {
    f.ensure_same_shape(u_prev, "update_u_l2")?;
    let pull_data = f.data().iter().map(|&x| cfg.lambda * x).collect();
    let pull = Image::new(f.width(), f.height(), 1, pull_data)?;
    let rhs = u_rhs(&pull, u_prev, v, lambda_mult, cfg.mu, cfg.tau)?;
    spectral_solve(cfg.lambda + cfg.tau, cfg.mu, &rhs)
}

/// Weighted-shrinkage v-update:
/// `v = shrink((mu grad u - Lambda + sigma v_prev) / (mu + sigma), g / (mu + sigma))`.
pub fn update_v<T: Scalar>(
    u_new: &Image<T>,
    v_prev: &VectorField<T>,
    lambda_mult: &VectorField<T>,
    weights: &WeightMap<T>,
    cfg: &SolverConfig<T>,
) -> Result<VectorField<T>> {
    let grad = gradient_forward(u_new)?;
    update_v_with_gradient(&grad, v_prev, lambda_mult, weights, cfg)
}

fn update_v_with_gradient<T: Scalar>(
    grad: &VectorField<T>,
    v_prev: &VectorField<T>,
    lambda_mult: &VectorField<T>,
    weights: &WeightMap<T>,
    cfg: &SolverConfig<T>,
) -> Result<VectorField<T>> {
    grad.ensure_same_shape(v_prev, "update_v")?;
    grad.ensure_same_shape(lambda_mult, "update_v")?;
    if weights.values().len() != grad.x().len() {
        return Err(CoreError::DimensionMismatch {
            context: "update_v weights",
            left_width: grad.width(),
            left_height: grad.height(),
            right_width: weights.width(),
            right_height: weights.height(),
        });
    }
    let denom = cfg.mu + cfg.sigma;
    let mut arg = VectorField::zeros(grad.width(), grad.height());
    for idx in 0..arg.x().len() {
        arg.x_mut()[idx] =
            (cfg.mu * grad.x()[idx] - lambda_mult.x()[idx] + cfg.sigma * v_prev.x()[idx]) / denom;
        arg.y_mut()[idx] =
            (cfg.mu * grad.y()[idx] - lambda_mult.y()[idx] + cfg.sigma * v_prev.y()[idx]) / denom;
    }
    let thresholds: Vec<T> = weights.values().iter().map(|&g| g / denom).collect();
    shrink(&arg, &thresholds)
}

/// Multiplier ascent: `Lambda + mu (v - grad u)`.
pub fn update_multiplier<T: Scalar>(
    lambda_mult: &VectorField<T>,
    v_new: &VectorField<T>,
    u_new: &Image<T>,
    mu: T,
) -> Result<VectorField<T>> {
    let grad = gradient_forward(u_new)?;
    update_multiplier_with_gradient(lambda_mult, v_new, &grad, mu)
}

fn update_multiplier_with_gradient<T: Scalar>(
    lambda_mult: &VectorField<T>,
    v_new: &VectorField<T>,
    grad: &VectorField<T>,
    mu: T,
) -> Result<VectorField<T>> {
    lambda_mult.ensure_same_shape(v_new, "update_multiplier")?;
    lambda_mult.ensure_same_shape(grad, "update_multiplier")?;
    let mut out = VectorField::zeros(grad.width(), grad.height());
    for idx in 0..out.x().len() {
        out.x_mut()[idx] = lambda_mult.x()[idx] + mu * (v_new.x()[idx] - grad.x()[idx]);
        out.y_mut()[idx] = lambda_mult.y()[idx] + mu * (v_new.y()[idx] - grad.y()[idx]);
    }
    Ok(out)
}

/// L1-fidelity w-update: scalar soft threshold of `u - f + b2` at `lambda / mu2`.
pub fn update_w_l1<T: Scalar>(
    f: &Image<T>,
    u: &Image<T>,
    b2: &Image<T>,
    cfg: &SolverConfig<T>,
) -> Result<Image<T>> {
    f.ensure_same_shape(u, "update_w_l1")?;
    f.ensure_same_shape(b2, "update_w_l1")?;
    let mu2 = cfg.mu2_value();
    let threshold = cfg.lambda / mu2;
    let data = f
        .data()
        .iter()
        .zip(u.data())
        .zip(b2.data())
        .map(|((&fv, &uv), &bv)| shrink_scalar(uv - fv + bv, threshold))
        .collect();
    Image::new(f.width(), f.height(), 1, data)
}

/// Stable positive root of `mu2 w^2 + (lambda - mu2 (u - b2)) w - lambda f = 0`,
/// the per-pixel KL w-update. Returns w >= 0, with w > 0 whenever f > 0.
#[inline]
pub fn kl_root<T: Scalar>(f: T, u_minus_b2: T, lambda: T, mu2: T) -> T {
    let two = T::from_f64_lossy(2.0);
    let four = T::from_f64_lossy(4.0);
    let r = mu2 * u_minus_b2 - lambda;
    let disc = (r * r + four * mu2 * lambda * f).sqrt();
    if r > T::zero() {
        (r + disc) / (two * mu2)
    } else {
        // rationalized form avoids cancellation when r <= 0
        let denom = disc - r;
        if denom > T::zero() {
            two * lambda * f / denom
        } else {
            T::zero()
        }
    }
}

/// KL-fidelity w-update, the per-pixel minimizer of
/// `lambda (w - f log w) + (mu2/2)(w - u + b2)^2`.
pub fn update_w_kl<T: Scalar>(
    f: &Image<T>,
    u: &Image<T>,
    b2: &Image<T>,
    cfg: &SolverConfig<T>,
) -> Result<Image<T>> {
    f.ensure_same_shape(u, "update_w_kl")?;
    f.ensure_same_shape(b2, "update_w_kl")?;
    if f.data().iter().any(|&v| v < T::zero()) {
        return Err(CoreError::InvalidParameter {
            name: "f",
            reason: "KL fidelity requires nonnegative data".into(),
        });
    }
    let mu2 = cfg.mu2_value();
    let data = f
        .data()
        .iter()
        .zip(u.data())
        .zip(b2.data())
        .map(|((&fv, &uv), &bv)| kl_root(fv, uv - bv, cfg.lambda, mu2))
        .collect();
    Image::new(f.width(), f.height(), 1, data)
}

/// Inpainting w-update: `w = (lambda chi f + mu2 (u + b2)) / (lambda chi + mu2)`
/// with chi = 1 on observed pixels; on the hole it reduces to `w = u + b2`.
pub fn update_w_inpaint<T: Scalar>(
    f: &Image<T>,
    u: &Image<T>,
    b2: &Image<T>,
    mask: &InpaintMask,
    cfg: &SolverConfig<T>,
) -> Result<Image<T>> {
    f.ensure_same_shape(u, "update_w_inpaint")?;
    f.ensure_same_shape(b2, "update_w_inpaint")?;
    if mask.width() != f.width() || mask.height() != f.height() {
        return Err(CoreError::DimensionMismatch {
            context: "update_w_inpaint mask",
            left_width: f.width(),
            left_height: f.height(),
            right_width: mask.width(),
            right_height: mask.height(),
        });
    }
    let mu2 = cfg.mu2_value();
    let mut data = Vec::with_capacity(f.data().len());
    for idx in 0..f.data().len() {
        let target = u.data()[idx] + b2.data()[idx];
        if mask.known()[idx] {
            data.push((cfg.lambda * f.data()[idx] + mu2 * target) / (cfg.lambda + mu2));
        } else {
            data.push(target);
        }
    }
    Image::new(f.width(), f.height(), 1, data)
}

const LOG_CLAMP: f64 = 1e-12;

/// Fidelity contribution to the model energy, evaluated at `point`.
fn fidelity_energy<T: Scalar>(fidelity: &Fidelity, lambda: T, point: &Image<T>, f: &Image<T>) -> T {
    let half = T::from_f64_lossy(0.5);
    match fidelity {
        Fidelity::L2 => {
            let ssd = point
                .data()
                .iter()
                .zip(f.data())
                .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
            half * lambda * ssd
        }
        Fidelity::L1 => {
            let sad = point
                .data()
                .iter()
                .zip(f.data())
                .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs());
            lambda * sad
        }
        Fidelity::Kl => {
            let clamp = T::from_f64_lossy(LOG_CLAMP);
            let kl = point
                .data()
                .iter()
                .zip(f.data())
                .fold(T::zero(), |acc, (&w, &fv)| acc + w - fv * w.max(clamp).ln());
            lambda * kl
        }
        Fidelity::Inpaint(mask) => {
            let ssd = point
                .data()
                .iter()
                .zip(f.data())
                .zip(mask.known())
                .filter(|(_, &known)| known)
                .fold(T::zero(), |acc, ((&a, &b), _)| acc + (a - b) * (a - b));
            half * lambda * ssd
        }
    }
}

fn weighted_tv<T: Scalar>(weights: &WeightMap<T>, grad: &VectorField<T>) -> T {
    let mut sum = T::zero();
    for idx in 0..weights.values().len() {
        let (x, y) = (grad.x()[idx], grad.y()[idx]);
        sum += weights.values()[idx] * (x * x + y * y).sqrt();
    }
    sum
}

/// Model energy `sum g(kappa(u_weight_source)) |grad u| + fidelity(u, f)`:
/// the weights come from a (typically previous) iterate, gradient and
/// fidelity from the current one. The KL variant evaluates its log on `u`
/// clamped away from zero; inside the solver loop the fidelity is instead
/// evaluated on the split variable, which the closed form keeps nonnegative.
pub fn energy<T: Scalar>(
    u: &Image<T>,
    u_weight_source: &Image<T>,
    f: &Image<T>,
    cfg: &SolverConfig<T>,
) -> Result<T> {
    u.ensure_same_shape(f, "energy")?;
    u.ensure_same_shape(u_weight_source, "energy")?;
    let weights = if cfg.curvature.weight_kind == WeightKind::Tv {
        WeightMap::ones(u.width(), u.height())
    } else {
        weight_map(&curvature_map(u_weight_source, &cfg.curvature)?, &cfg.curvature)?
    };
    let grad = gradient_forward(u)?;
    Ok(weighted_tv(&weights, &grad) + fidelity_energy(&cfg.fidelity, cfg.lambda, u, f))
}

/// Post-hoc Delta_k sequence: for each stored iterate,
/// `Delta_k = <(g(kappa^k) - g(kappa_ref)) s^k, v^k - v_ref>` with the
/// subgradient choice `s^k = v^k / |v^k|` (zero at the origin).
pub fn delta_k_diagnostic<T: Scalar>(
    history: &[(VectorField<T>, CurvatureMap<T>)],
    reference: &(VectorField<T>, CurvatureMap<T>),
    spec: &CurvatureSpec<T>,
) -> Result<Vec<T>> {
    if history.is_empty() {
        return Err(CoreError::InvalidParameter {
            name: "history",
            reason: "Delta_k needs at least one stored iterate".into(),
        });
    }
    let (ref_v, ref_kappa) = reference;
    let ref_weights = weight_map(ref_kappa, spec)?;
    let mut deltas = Vec::with_capacity(history.len());
    for (v, kappa) in history {
        v.ensure_same_shape(ref_v, "delta_k_diagnostic")?;
        let weights = weight_map(kappa, spec)?;
        let mut delta = T::zero();
        for idx in 0..weights.values().len() {
            let (vx, vy) = (v.x()[idx], v.y()[idx]);
            let norm = (vx * vx + vy * vy).sqrt();
            if norm > T::zero() {
                let (sx, sy) = (vx / norm, vy / norm);
                let gdiff = weights.values()[idx] - ref_weights.values()[idx];
                delta += gdiff * (sx * (vx - ref_v.x()[idx]) + sy * (vy - ref_v.y()[idx]));
            }
        }
        deltas.push(delta);
    }
    Ok(deltas)
}

fn rel_change<T: Scalar>(diff_l1: T, denom_l1: T) -> T {
    if denom_l1 > T::zero() {
        diff_l1 / denom_l1
    } else {
        T::infinity()
    }
}

fn l1_diff_images<T: Scalar>(a: &Image<T>, b: &Image<T>) -> T {
    a.data()
        .iter()
        .zip(b.data())
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y).abs())
}

fn l1_diff_fields<T: Scalar>(a: &VectorField<T>, b: &VectorField<T>) -> T {
    let x = a
        .x()
        .iter()
        .zip(b.x())
        .fold(T::zero(), |acc, (&p, &q)| acc + (p - q).abs());
    a.y()
        .iter()
        .zip(b.y())
        .fold(x, |acc, (&p, &q)| acc + (p - q).abs())
}

/// Runs the full ADMM loop on a single-channel image.
///
/// Initialization: u = f, v = 0, Lambda = 0 (and w = u - f or u, b2 = 0 for
/// the two-split fidelities). Returns once the relative change of u drops
/// below `cfg.tol` or after `cfg.max_iter` iterations.
pub fn admm_solve<T: Scalar>(f: &Image<T>, cfg: &SolverConfig<T>) -> Result<SolveResult<T>> {
    f.ensure_single_channel("admm_solve")?;
    cfg.validate()?;
    if !f.is_finite() {
        return Err(CoreError::NonFinite { what: "input image" });
    }
    let (w_px, h_px) = (f.width(), f.height());
    match &cfg.fidelity {
        Fidelity::Inpaint(mask) => {
            if mask.width() != w_px || mask.height() != h_px {
                return Err(CoreError::DimensionMismatch {
                    context: "admm_solve mask",
                    left_width: w_px,
                    left_height: h_px,
                    right_width: mask.width(),
                    right_height: mask.height(),
                });
            }
        }
        Fidelity::Kl if f.data().iter().any(|&v| v < T::zero()) => {
            return Err(CoreError::InvalidParameter {
                name: "f",
                reason: "KL fidelity requires nonnegative data".into(),
            });
        }
        _ => {}
    }

    let is_tv = cfg.curvature.weight_kind == WeightKind::Tv;
    let mut spectral = SpectralSolver::new(w_px, h_px);

    let mut u = f.clone();
    let mut v = VectorField::zeros(w_px, h_px);
    let mut lambda_mult = VectorField::zeros(w_px, h_px);
    // fidelity split state (w tracks u - f for L1, u itself for KL/inpaint)
    let mut w_split = match cfg.fidelity {
        Fidelity::L1 => Some(Image::zeros(w_px, h_px)),
        Fidelity::Kl | Fidelity::Inpaint(_) => Some(f.clone()),
        Fidelity::L2 => None,
    };
    let mut b2 = if cfg.fidelity.needs_split() {
        Some(Image::zeros(w_px, h_px))
    } else {
        None
    };

    let mut weights_prev = if is_tv {
        WeightMap::ones(w_px, h_px)
    } else {
        weight_map(&curvature_map(&u, &cfg.curvature)?, &cfg.curvature)?
    };

    let mut records: Vec<IterationRecord<T>> = Vec::new();
    let mut history: Vec<(VectorField<T>, CurvatureMap<T>)> = Vec::new();
    let mut converged = false;

    for iteration in 1..=cfg.max_iter {
        let started = Instant::now();

        // (i) u-update: screened-Poisson solve
        let (a_coeff, pull) = match &cfg.fidelity {
            Fidelity::L2 => {
                let data = f.data().iter().map(|&x| cfg.lambda * x).collect();
                (cfg.lambda + cfg.tau, Image::new(w_px, h_px, 1, data)?)
            }
            Fidelity::L1 => {
                let mu2 = cfg.mu2_value();
                let w_img = w_split.as_ref().unwrap();
                let b = b2.as_ref().unwrap();
                let data = f
                    .data()
                    .iter()
                    .zip(w_img.data())
                    .zip(b.data())
                    .map(|((&fv, &wv), &bv)| mu2 * (fv + wv - bv))
                    .collect();
                (mu2 + cfg.tau, Image::new(w_px, h_px, 1, data)?)
            }
            Fidelity::Kl => {
                let mu2 = cfg.mu2_value();
                let w_img = w_split.as_ref().unwrap();
                let b = b2.as_ref().unwrap();
                let data = w_img
                    .data()
                    .iter()
                    .zip(b.data())
                    .map(|(&wv, &bv)| mu2 * (wv + bv))
                    .collect();
                (mu2 + cfg.tau, Image::new(w_px, h_px, 1, data)?)
            }
            Fidelity::Inpaint(_) => {
                let mu2 = cfg.mu2_value();
                let w_img = w_split.as_ref().unwrap();
                let b = b2.as_ref().unwrap();
                let data = w_img
                    .data()
                    .iter()
                    .zip(b.data())
                    .map(|(&wv, &bv)| mu2 * (wv - bv))
                    .collect();
                (mu2 + cfg.tau, Image::new(w_px, h_px, 1, data)?)
            }
        };
        let rhs = u_rhs(&pull, &u, &v, &lambda_mult, cfg.mu, cfg.tau)?;
        let u_new = spectral.solve(a_coeff, cfg.mu, &rhs)?;
        if !u_new.is_finite() {
            return Err(CoreError::SolverDiverged { iteration, variable: "u" });
        }

        // (ii) curvature weights from the fresh iterate
        let (kappa_new, weights_new) = if is_tv {
            (None, WeightMap::ones(w_px, h_px))
        } else {
            let kmap = curvature_map(&u_new, &cfg.curvature)?;
            let wmap = weight_map(&kmap, &cfg.curvature)?;
            (Some(kmap), wmap)
        };

        // (iii) v-update by weighted shrinkage
        let grad_new = gradient_forward(&u_new)?;
        let v_new = update_v_with_gradient(&grad_new, &v, &lambda_mult, &weights_new, cfg)?;
        if !v_new.is_finite() {
            return Err(CoreError::SolverDiverged { iteration, variable: "v" });
        }

        // fidelity split update (w, then its multiplier)
        let (w_new, b2_new) = match &cfg.fidelity {
            Fidelity::L2 => (None, None),
            Fidelity::L1 => {
                let b = b2.as_ref().unwrap();
                let w_next = update_w_l1(f, &u_new, b, cfg)?;
                let b_data = b
                    .data()
                    .iter()
                    .zip(u_new.data())
                    .zip(f.data())
                    .zip(w_next.data())
                    .map(|(((&bv, &uv), &fv), &wv)| bv + (uv - fv - wv))
                    .collect();
                (Some(w_next), Some(Image::new(w_px, h_px, 1, b_data)?))
            }
            Fidelity::Kl => {
                let b = b2.as_ref().unwrap();
                let w_next = update_w_kl(f, &u_new, b, cfg)?;
                let b_data = b
                    .data()
                    .iter()
                    .zip(w_next.data())
                    .zip(u_new.data())
                    .map(|((&bv, &wv), &uv)| bv + (wv - uv))
                    .collect();
                (Some(w_next), Some(Image::new(w_px, h_px, 1, b_data)?))
            }
            Fidelity::Inpaint(mask) => {
                let b = b2.as_ref().unwrap();
                let w_next = update_w_inpaint(f, &u_new, b, mask, cfg)?;
                let b_data = b
                    .data()
                    .iter()
                    .zip(u_new.data())
                    .zip(w_next.data())
                    .map(|((&bv, &uv), &wv)| bv + (uv - wv))
                    .collect();
                (Some(w_next), Some(Image::new(w_px, h_px, 1, b_data)?))
            }
        };
        if let Some(w_img) = &w_new {
            if !w_img.is_finite() {
                return Err(CoreError::SolverDiverged { iteration, variable: "w" });
            }
        }

        // (iv) multiplier ascent
        let lambda_new = update_multiplier_with_gradient(&lambda_mult, &v_new, &grad_new, cfg.mu)?;
        if !lambda_new.is_finite() {
            return Err(CoreError::SolverDiverged { iteration, variable: "Lambda" });
        }

        // diagnostics: energy weights come from the previous iterate
        let fid_point = match &cfg.fidelity {
            Fidelity::Kl => w_new.as_ref().unwrap(),
            _ => &u_new,
        };
        let energy_val = weighted_tv(&weights_prev, &grad_new)
            + fidelity_energy(&cfg.fidelity, cfg.lambda, fid_point, f);
        let residual = l1_diff_fields(&v_new, &grad_new);
        let rel_u = rel_change(l1_diff_images(&u_new, &u), u.l1_norm());
        let rel_lambda = rel_change(l1_diff_fields(&lambda_new, &lambda_mult), lambda_mult.l1_norm());

        if cfg.track_delta_k {
            if let Some(kmap) = &kappa_new {
                history.push((v_new.clone(), kmap.clone()));
            }
        }

        records.push(IterationRecord {
            energy: energy_val,
            residual_l1: residual,
            rel_err_u: rel_u,
            rel_err_lambda: rel_lambda,
            delta_k: None,
            time_ms: started.elapsed().as_secs_f64() * 1e3,
        });

        // (v) convergence check on the relative change of u
        converged = rel_u.is_finite() && rel_u <= cfg.tol;

        u = u_new;
        v = v_new;
        lambda_mult = lambda_new;
        w_split = w_new.or(w_split);
        b2 = b2_new.or(b2);
        weights_prev = weights_new;

        if converged {
            break;
        }
    }

    if cfg.track_delta_k {
        if let Some(reference) = history.last().cloned() {
            let deltas = delta_k_diagnostic(&history, &reference, &cfg.curvature)?;
            for (record, delta) in records.iter_mut().zip(deltas) {
                record.delta_k = Some(delta);
            }
        } else if is_tv {
            // g == 1 makes Delta_k identically zero; no history is needed
            for record in records.iter_mut() {
                record.delta_k = Some(T::zero());
            }
        }
    }

    let iterations_used = records.len();
    Ok(SolveResult {
        restored: u,
        trace: IterationTrace { records },
        iterations_used,
        converged,
        delta_history: cfg.track_delta_k.then_some(history),
    })
}

/// Channel-wise solve for 3-channel images; channels run concurrently and
/// the result is bit-identical to solving them in sequence.
pub fn solve_color<T: Scalar>(f: &Image<T>, cfg: &SolverConfig<T>) -> Result<ColorSolveResult<T>> {
    if f.channels() != 3 {
        return Err(CoreError::ChannelMismatch { context: "solve_color", channels: f.channels() });
    }
    cfg.validate()?;
    let planes: Vec<Image<T>> = (0..3).map(|c| f.channel(c)).collect();
    let results: Vec<Result<SolveResult<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = planes
            .iter()
            .map(|plane| scope.spawn(move || admm_solve(plane, cfg)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("channel solve panicked")).collect()
    });
    let mut per_channel = Vec::with_capacity(3);
    for result in results {
        per_channel.push(result?);
    }
    let restored =
        Image::from_channels(&per_channel.iter().map(|r| r.restored.clone()).collect::<Vec<_>>())?;
    Ok(ColorSolveResult { restored, per_channel })
}
