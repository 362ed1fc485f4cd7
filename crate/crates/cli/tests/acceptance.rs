//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured values (visible with `--nocapture`). The tests serialize on
//! a global lock so the wall-clock budgets are honest.

use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

use curvtv_core::curvature::{
    curvature_map, normal_curvatures, principal_and_hk, tangent_plane_distances, CurvatureKind,
    CurvatureSpec, WeightKind,
};
use curvtv_core::image::{
    divergence, gradient_forward, inner_product_fields, inner_product_images, Image, VectorField,
};
use curvtv_core::metrics::{psnr, ssim};
use curvtv_core::noise::{add_noise, NoiseModel};
use curvtv_core::solver::{admm_solve, kl_root, spectral_solve, SolverConfig};
use curvtv_core::synth::{random_missing_mask, shapes};
use rand::{rngs::StdRng, Rng, SeedableRng};

static LOCK: Mutex<()> = Mutex::new(());

fn cameraman() -> Image<f64> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../assets/cameraman.pgm");
    curvtv_io::load_image(&path).expect("bundled cameraman asset")
}

fn rescale(img: &Image<f64>, s: f64) -> Image<f64> {
    Image::new(img.width(), img.height(), 1, img.data().iter().map(|v| v * s).collect()).unwrap()
}

fn random_patch(rng: &mut StdRng) -> [[f64; 3]; 3] {
    let mut p = [[0.0; 3]; 3];
    for row in p.iter_mut() {
        for v in row.iter_mut() {
            *v = rng.random_range(0.0..255.0f64);
        }
    }
    p
}

/// Independent transcription of the eight tangent-plane distances, the
/// normal curvatures and the principal-curvature reduction, kept free of
/// any call into the library.
mod oracle {
    pub fn distances(p: &[[f64; 3]; 3]) -> [f64; 8] {
        let (umm, um0, ump) = (p[0][0], p[0][1], p[0][2]);
        let (u0m, u00, u0p) = (p[1][0], p[1][1], p[1][2]);
        let (upm, up0, upp) = (p[2][0], p[2][1], p[2][2]);
        [
            (2.0 * u00 - u0m - u0p)
                / ((2.0 * um0 - u0m - u0p).powi(2) + (u0m - u0p).powi(2) + 4.0).sqrt(),
            (u0m + u0p - 2.0 * u00)
                / ((2.0 * up0 - u0m - u0p).powi(2) + (u0p - u0m).powi(2) + 4.0).sqrt(),
            (um0 + up0 - 2.0 * u00)
                / ((up0 - um0).powi(2) + (um0 + up0 - 2.0 * u0m).powi(2) + 4.0).sqrt(),
            (2.0 * u00 - um0 - up0)
                / ((um0 - up0).powi(2) + (um0 + up0 - 2.0 * u0p).powi(2) + 4.0).sqrt(),
            (ump + upm - 2.0 * u00)
                / ((upm - umm).powi(2) + (ump - umm).powi(2) + 4.0).sqrt(),
            (2.0 * u00 - ump - upm)
                / ((ump - upp).powi(2) + (upm - upp).powi(2) + 4.0).sqrt(),
            (2.0 * u00 - umm - upp)
                / ((ump - upp).powi(2) + (umm - ump).powi(2) + 4.0).sqrt(),
            (umm + upp - 2.0 * u00)
                / ((upm - umm).powi(2) + (upp - upm).powi(2) + 4.0).sqrt(),
        ]
    }

    pub fn curvatures(p: &[[f64; 3]; 3], h: f64) -> [f64; 8] {
        let d = distances(p);
        let u00 = p[1][1];
        let neighbors = [
            p[0][1], p[2][1], p[1][0], p[1][2], // axial: up, down, left, right
            p[0][0], p[2][2], p[0][2], p[2][0], // diagonal
        ];
        let mut k = [0.0; 8];
        for l in 0..8 {
            let arc2 = (neighbors[l] - u00).powi(2) + if l < 4 { h * h } else { 2.0 * h * h };
            k[l] = 2.0 * d[l] / arc2;
        }
        k
    }

    pub fn reduce(k: &[f64; 8]) -> (f64, f64, f64, f64) {
        let kmax = k.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let kmin = k.iter().cloned().fold(f64::INFINITY, f64::min);
        (kmax, kmin, 0.5 * (kmax + kmin), kmax * kmin)
    }
}

#[test]
fn criterion_01_curvature_oracle_equivalence() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(314159);
    let mut max_dev = 0.0f64;
    for _ in 0..10_000 {
        let patch = random_patch(&mut rng);
        let d_lib = tangent_plane_distances(&patch).unwrap();
        let d_ora = oracle::distances(&patch);
        let k_lib = normal_curvatures(&patch, 1.0).unwrap();
        let k_ora = oracle::curvatures(&patch, 1.0);
        let (max_l, min_l, h_l, g_l) = principal_and_hk(&k_lib).unwrap();
        let (max_o, min_o, h_o, g_o) = oracle::reduce(&k_ora);
        for l in 0..8 {
            max_dev = max_dev.max((d_lib[l] - d_ora[l]).abs());
            max_dev = max_dev.max((k_lib[l] - k_ora[l]).abs());
        }
        for (a, b) in [(max_l, max_o), (min_l, min_o), (h_l, h_o), (g_l, g_o)] {
            max_dev = max_dev.max((a - b).abs());
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(max_dev <= 1e-12, "oracle deviation {max_dev:.3e}");
    assert!(elapsed < 1.0, "runtime {elapsed:.2}s exceeds 1s");
    println!("criterion 01 (curvature oracle equivalence): PASS - max deviation {max_dev:.2e} over 10^4 patches, {elapsed:.2}s");
}

#[test]
fn criterion_02_zero_curvature_calibration() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();

    for kind in [CurvatureKind::Mean, CurvatureKind::Gaussian] {
        let spec = CurvatureSpec::new(kind, WeightKind::Tac, 0.5);
        let constant = Image::constant(64, 64, 119.0);
        let map = curvature_map(&constant, &spec).unwrap();
        assert!(map.values().iter().all(|&v| v == 0.0), "{kind:?} constant map not zero");

        let mut ramp = Image::zeros(64, 64);
        for i in 0..64 {
            for j in 0..64 {
                ramp.set(i, j, i as f64);
            }
        }
        let map = curvature_map(&ramp, &spec).unwrap();
        for i in 1..63 {
            for j in 1..63 {
                assert_eq!(map.at(i, j), 0.0, "{kind:?} ramp interior ({i},{j})");
            }
        }
    }

    let mut spike = [[0.0; 3]; 3];
    spike[1][1] = 1.0;
    let k = normal_curvatures(&spike, 1.0).unwrap();
    let (_, _, mean, gauss) = principal_and_hk(&k).unwrap();
    assert_eq!(mean, 0.0);
    assert_eq!(gauss, -1.0);

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "runtime {elapsed:.2}s exceeds 1s");
    println!("criterion 02 (zero-curvature calibration): PASS - constant/ramp maps exactly zero, spike (H,K)=(0,-1), {elapsed:.2}s");
}

#[test]
fn criterion_03_operator_correctness() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(271828);
    let mut worst_adjoint = 0.0f64;
    let mut worst_residual = 0.0f64;
    for _ in 0..100 {
        let (w, h) = (32, 32);
        let u = Image::new(w, h, 1, (0..w * h).map(|_| rng.random_range(0.0..255.0f64)).collect())
            .unwrap();
        let p = VectorField::new(
            w,
            h,
            (0..w * h).map(|_| rng.random_range(-100.0..100.0f64)).collect(),
            (0..w * h).map(|_| rng.random_range(-100.0..100.0f64)).collect(),
        )
        .unwrap();

        let grad = gradient_forward(&u).unwrap();
        let div = divergence(&p).unwrap();
        let defect = (inner_product_fields(&grad, &p) + inner_product_images(&u, &div)).abs();
        let bound = 1e-10 * (u.l2_norm() * p.l2_norm()).max(1.0);
        assert!(defect <= bound, "adjointness defect {defect:.3e} > {bound:.3e}");
        worst_adjoint = worst_adjoint.max(defect / bound);

        let a = rng.random_range(0.01..5.0f64);
        let b = rng.random_range(0.0..5.0f64);
        let x = spectral_solve(a, b, &u).unwrap();
        let lap = divergence(&gradient_forward(&x).unwrap()).unwrap();
        let scale = u.data().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for idx in 0..u.data().len() {
            let r = (a * x.data()[idx] - b * lap.data()[idx] - u.data()[idx]).abs();
            assert!(r <= 1e-8 * scale, "screened-solve residual {r:.3e}");
            worst_residual = worst_residual.max(r / scale);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "runtime {elapsed:.2}s exceeds 5s");
    println!("criterion 03 (operator correctness): PASS - worst adjointness {worst_adjoint:.2e} of bound, worst solve residual {worst_residual:.2e}, {elapsed:.2}s");
}

/// Plain TV-ADMM coded independently: its own wrap-around differences, its
/// own conjugate-gradient screened solve (no FFT anywhere), its own
/// isotropic shrinkage; same splitting, iteration order and initialization.
mod plain_tv {
    pub struct Grid {
        pub w: usize,
        pub h: usize,
        pub v: Vec<f64>,
    }

    fn grad(u: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
        let mut gx = vec![0.0; w * h];
        let mut gy = vec![0.0; w * h];
        for i in 0..h {
            for j in 0..w {
                let inext = if i + 1 == h { 0 } else { i + 1 };
                let jnext = if j + 1 == w { 0 } else { j + 1 };
                gx[i * w + j] = u[inext * w + j] - u[i * w + j];
                gy[i * w + j] = u[i * w + jnext] - u[i * w + j];
            }
        }
        (gx, gy)
    }

    fn div(px: &[f64], py: &[f64], w: usize, h: usize) -> Vec<f64> {
        let mut out = vec![0.0; w * h];
        for i in 0..h {
            for j in 0..w {
                let iprev = if i == 0 { h - 1 } else { i - 1 };
                let jprev = if j == 0 { w - 1 } else { j - 1 };
                out[i * w + j] =
                    px[i * w + j] - px[iprev * w + j] + py[i * w + j] - py[i * w + jprev];
            }
        }
        out
    }

    /// Solves (a I - mu Laplacian) x = rhs by conjugate gradients on the
    /// 5-point stencil.
    fn screened_cg(a: f64, mu: f64, rhs: &[f64], w: usize, h: usize) -> Vec<f64> {
        let apply = |x: &[f64]| -> Vec<f64> {
            let (gx, gy) = grad(x, w, h);
            let lap = div(&gx, &gy, w, h);
            x.iter().zip(&lap).map(|(xv, lv)| a * xv - mu * lv).collect()
        };
        let mut x = vec![0.0; rhs.len()];
        let mut r = rhs.to_vec();
        let mut p = r.clone();
        let mut rs: f64 = r.iter().map(|v| v * v).sum();
        let target = rs * 1e-26;
        for _ in 0..10_000 {
            if rs <= target || rs == 0.0 {
                break;
            }
            let ap = apply(&p);
            let alpha = rs / p.iter().zip(&ap).map(|(pv, av)| pv * av).sum::<f64>();
            for idx in 0..x.len() {
                x[idx] += alpha * p[idx];
                r[idx] -= alpha * ap[idx];
            }
            let rs_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rs_new / rs;
            for idx in 0..p.len() {
                p[idx] = r[idx] + beta * p[idx];
            }
            rs = rs_new;
        }
        x
    }

    pub fn solve(f: &Grid, lambda: f64, mu: f64, iterations: usize) -> Vec<f64> {
        let (w, h) = (f.w, f.h);
        let n = w * h;
        let mut u = f.v.clone();
        let mut vx = vec![0.0; n];
        let mut vy = vec![0.0; n];
        let mut lx = vec![0.0; n];
        let mut ly = vec![0.0; n];
        for _ in 0..iterations {
            // u-step: (lambda I - mu Lap) u = lambda f - div(mu v + Lambda)
            let cx: Vec<f64> = vx.iter().zip(&lx).map(|(v, l)| mu * v + l).collect();
            let cy: Vec<f64> = vy.iter().zip(&ly).map(|(v, l)| mu * v + l).collect();
            let d = div(&cx, &cy, w, h);
            let rhs: Vec<f64> =
                f.v.iter().zip(&d).map(|(fv, dv)| lambda * fv - dv).collect();
            u = screened_cg(lambda, mu, &rhs, w, h);

            // v-step: isotropic shrinkage of grad u - Lambda / mu at 1 / mu
            let (gx, gy) = grad(&u, w, h);
            for idx in 0..n {
                let ax = gx[idx] - lx[idx] / mu;
                let ay = gy[idx] - ly[idx] / mu;
                let norm = (ax * ax + ay * ay).sqrt();
                let thresh = 1.0 / mu;
                if norm > thresh {
                    let s = (norm - thresh) / norm;
                    vx[idx] = ax * s;
                    vy[idx] = ay * s;
                } else {
                    vx[idx] = 0.0;
                    vy[idx] = 0.0;
                }
            }

            // multiplier ascent
            for idx in 0..n {
                lx[idx] += mu * (vx[idx] - gx[idx]);
                ly[idx] += mu * (vy[idx] - gy[idx]);
            }
        }
        u
    }
}

#[test]
fn criterion_04_tv_degeneracy() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();

    let clean = shapes::<f64>(32, 32);
    let noisy = add_noise(&clean, NoiseModel::Gaussian { sigma: 10.0 }, 5).unwrap();
    let iterations = 40;
    let (lambda, mu) = (0.1, 1.0);

    let spec = CurvatureSpec::new(CurvatureKind::Mean, WeightKind::Tv, 0.0);
    let mut cfg = SolverConfig::l2(lambda, mu, spec);
    cfg.max_iter = iterations;
    cfg.tol = f64::MIN_POSITIVE; // never triggers
    let ours = admm_solve(&noisy, &cfg).unwrap();
    assert_eq!(ours.iterations_used, iterations);

    let oracle = plain_tv::solve(
        &plain_tv::Grid { w: 32, h: 32, v: noisy.data().to_vec() },
        lambda,
        mu,
        iterations,
    );

    let max_diff = ours
        .restored
        .data()
        .iter()
        .zip(&oracle)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let elapsed = started.elapsed().as_secs_f64();
    assert!(max_diff <= 1e-6, "TV mismatch {max_diff:.3e}");
    assert!(elapsed < 10.0, "runtime {elapsed:.2}s exceeds 10s");
    println!("criterion 04 (TV degeneracy): PASS - max abs difference {max_diff:.2e} after {iterations} iterations, {elapsed:.2}s");
}

/// The shared setup of criteria 5 and 6: 128x128 shapes scene, Gaussian
/// sigma = 10 (seed 7), TAC-MC with lambda = 0.09, mu = 0.01, alpha = 0.1,
/// tau = sigma = 0, tolerance 3e-5.
fn criterion5_run() -> (Image<f64>, Image<f64>, curvtv_core::solver::SolveResult<f64>) {
    let clean = shapes::<f64>(128, 128);
    let noisy = add_noise(&clean, NoiseModel::Gaussian { sigma: 10.0 }, 7).unwrap();
    let spec = CurvatureSpec::on_unit_range(CurvatureKind::Mean, WeightKind::Tac, 0.1);
    let mut cfg = SolverConfig::l2(0.09, 0.01, spec);
    cfg.tol = 3e-5;
    cfg.track_delta_k = true;
    let result = admm_solve(&noisy, &cfg).unwrap();
    (clean, noisy, result)
}

#[test]
fn criterion_05_convergence_diagnostics() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();
    let (_, _, result) = criterion5_run();
    let rec = &result.trace.records;

    let mut worst_increase = f64::NEG_INFINITY;
    for k in 2..rec.len() {
        worst_increase =
            worst_increase.max((rec[k].energy - rec[k - 1].energy) / rec[k - 1].energy.abs());
    }
    assert!(worst_increase <= 1e-8, "energy increased by {worst_increase:.3e} relative");

    assert!(rec.len() > 10, "run too short to evaluate the residual decay");
    let ratio = rec[9].residual_l1 / rec.last().unwrap().residual_l1;
    assert!(ratio >= 10.0, "residual ratio {ratio:.2} < 10");

    let min_delta = rec.iter().filter_map(|r| r.delta_k).fold(f64::INFINITY, f64::min);
    assert!(min_delta >= -1e-6, "min Delta_k = {min_delta:.3e}");

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime {elapsed:.2}s exceeds 30s");
    println!("criterion 05 (convergence diagnostics): PASS - worst energy increase {worst_increase:.2e}, residual ratio {ratio:.1}, min Delta_k {min_delta:.2e}, {} iterations, {elapsed:.2}s", rec.len());
}

#[test]
fn criterion_06_denoising_gain() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();
    let (clean, noisy, result) = criterion5_run();
    let gain = psnr(&clean, &result.restored).unwrap() - psnr(&clean, &noisy).unwrap();
    let similarity = ssim(&clean, &result.restored).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert!(gain >= 6.0, "PSNR gain {gain:.2} dB < 6 dB");
    assert!(similarity >= 0.93, "SSIM {similarity:.4} < 0.93");
    println!("criterion 06 (denoising gain): PASS - gain {gain:.2} dB, SSIM {similarity:.4}, {elapsed:.2}s");
}

#[test]
fn criterion_07_cameraman_soft_reproduction() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();
    let clean = cameraman();
    let noisy = add_noise(&clean, NoiseModel::Gaussian { sigma: 20.0 }, 42).unwrap();
    let spec = CurvatureSpec::on_unit_range(CurvatureKind::Gaussian, WeightKind::Tac, 5.0);
    let mut cfg = SolverConfig::l2(0.07, 2.0, spec);
    cfg.tol = 3e-5;
    let result = admm_solve(&noisy, &cfg).unwrap();

    let p = psnr(&clean, &result.restored).unwrap();
    let s = ssim(&clean, &result.restored).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert!((28.4..=29.4).contains(&p), "PSNR {p:.3} outside [28.4, 29.4]");
    assert!((0.82..=0.85).contains(&s), "SSIM {s:.4} outside [0.82, 0.85]");
    assert!(result.iterations_used <= 300, "{} iterations", result.iterations_used);
    assert!(elapsed < 60.0, "runtime {elapsed:.2}s exceeds 60s");
    println!("criterion 07 (cameraman soft reproduction): PASS - PSNR {p:.2} dB, SSIM {s:.4}, {} iterations, {elapsed:.2}s", result.iterations_used);
}

#[test]
fn criterion_08_impulse_variant() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();
    let clean = shapes::<f64>(256, 256);
    let noisy = add_noise(&clean, NoiseModel::SaltPepper { fraction: 0.3 }, 42).unwrap();

    // the documented impulse-noise suite operates on [0, 1] intensities
    let spec = CurvatureSpec::new(CurvatureKind::Gaussian, WeightKind::Tac, 20.0);
    let mut cfg = SolverConfig::l1(1.6, 30.0, 120.0, spec);
    cfg.tol = 3e-5;
    let result = admm_solve(&rescale(&noisy, 1.0 / 255.0), &cfg).unwrap();
    let restored = rescale(&result.restored, 255.0);

    let p = psnr(&clean, &restored).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert!(p >= 25.0, "PSNR {p:.2} dB < 25 dB");
    assert!(elapsed < 60.0, "runtime {elapsed:.2}s exceeds 60s");
    println!("criterion 08 (impulse variant): PASS - PSNR {p:.2} dB, {} iterations, {elapsed:.2}s", result.iterations_used);
}

#[test]
fn criterion_09_poisson_variant() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();

    // stationarity of the closed-form KL w-update on 1e5 random instances
    let mut rng = StdRng::seed_from_u64(161803);
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let f = rng.random_range(0.01..255.0f64);
        let target = rng.random_range(-50.0..350.0f64); // u - b2
        let lambda = rng.random_range(0.1..30.0f64);
        let mu2 = rng.random_range(0.1..150.0f64);
        let w = kl_root(f, target, lambda, mu2);
        assert!(w > 0.0);
        let grad = lambda * (1.0 - f / w) + mu2 * (w - target);
        assert!(grad.abs() <= 1e-10, "stationarity defect {grad:.3e}");
        worst = worst.max(grad.abs());
    }

    // end-to-end Poisson denoise with the reference suite
    let clean = shapes::<f64>(128, 128);
    let noisy = add_noise(&clean, NoiseModel::Poisson, 42).unwrap();
    let spec = CurvatureSpec::on_unit_range(CurvatureKind::Gaussian, WeightKind::Tac, 15.0);
    let mut cfg = SolverConfig::kl(25.0, 2.0, 4.0, spec);
    cfg.tol = 7e-5;
    let result = admm_solve(&noisy, &cfg).unwrap();
    let gain = psnr(&clean, &result.restored).unwrap() - psnr(&clean, &noisy).unwrap();

    let elapsed = started.elapsed().as_secs_f64();
    assert!(gain >= 4.0, "PSNR gain {gain:.2} dB < 4 dB");
    assert!(elapsed < 30.0, "runtime {elapsed:.2}s exceeds 30s");
    println!("criterion 09 (Poisson variant): PASS - worst stationarity {worst:.2e}, PSNR gain {gain:.2} dB, {elapsed:.2}s");
}

#[test]
fn criterion_10_inpainting() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();
    let clean = shapes::<f64>(128, 128);
    let mask = random_missing_mask(128, 128, 0.1, 9).unwrap();
    let mut observed = clean.clone();
    for idx in 0..observed.data().len() {
        if !mask.known()[idx] {
            observed.data_mut()[idx] = 0.0;
        }
    }

    let spec = CurvatureSpec::on_unit_range(CurvatureKind::Gaussian, WeightKind::Tac, 5.0);
    let mut cfg = SolverConfig::inpaint(10.0, 0.5, 0.1, mask, spec);
    cfg.tol = 5e-4;
    let result = admm_solve(&observed, &cfg).unwrap();

    let p = psnr(&clean, &result.restored).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert!(p >= 30.0, "full-image PSNR {p:.2} dB < 30 dB");
    assert!(elapsed < 30.0, "runtime {elapsed:.2}s exceeds 30s");
    println!("criterion 10 (inpainting): PASS - full-image PSNR {p:.2} dB, {} iterations, {elapsed:.2}s", result.iterations_used);
}

#[test]
fn criterion_11_complexity_scaling() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();

    let median_iteration_ms = |size: usize| -> f64 {
        let clean = shapes::<f64>(size, size);
        let noisy = add_noise(&clean, NoiseModel::Gaussian { sigma: 10.0 }, 1).unwrap();
        let spec = CurvatureSpec::on_unit_range(CurvatureKind::Mean, WeightKind::Tac, 0.1);
        let mut cfg = SolverConfig::l2(0.09, 2.0, spec);
        cfg.tol = f64::MIN_POSITIVE;
        cfg.max_iter = 8; // warm-up: FFT plans, caches, allocator
        let _ = admm_solve(&noisy, &cfg).unwrap();
        cfg.max_iter = 40;
        let result = admm_solve(&noisy, &cfg).unwrap();
        let mut times: Vec<f64> = result.trace.records.iter().map(|r| r.time_ms).collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times[times.len() / 2]
    };

    let small = median_iteration_ms(128);
    let large = median_iteration_ms(256);
    let ratio = large / small;
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        (3.5..=5.5).contains(&ratio),
        "per-iteration scaling {ratio:.2} outside [3.5, 5.5] ({small:.2} ms -> {large:.2} ms)"
    );
    assert!(elapsed < 60.0, "runtime {elapsed:.2}s exceeds 60s");
    println!("criterion 11 (complexity scaling): PASS - median per-iteration {small:.2} ms at 128^2, {large:.2} ms at 256^2, ratio {ratio:.2}, {elapsed:.2}s");
}

/// Bit-compares every trace column except the wall-clock one.
fn assert_trace_numerics_identical(
    a: &curvtv_core::solver::IterationTrace<f64>,
    b: &curvtv_core::solver::IterationTrace<f64>,
) {
    assert_eq!(a.records.len(), b.records.len());
    for (ra, rb) in a.records.iter().zip(&b.records) {
        assert_eq!(ra.energy.to_bits(), rb.energy.to_bits());
        assert_eq!(ra.residual_l1.to_bits(), rb.residual_l1.to_bits());
        assert_eq!(ra.rel_err_u.to_bits(), rb.rel_err_u.to_bits());
        assert_eq!(ra.rel_err_lambda.to_bits(), rb.rel_err_lambda.to_bits());
        assert_eq!(ra.delta_k.map(f64::to_bits), rb.delta_k.map(f64::to_bits));
    }
}

#[test]
fn criterion_12_determinism() {
    let _guard = LOCK.lock().unwrap();
    let started = Instant::now();

    let bits = |img: &Image<f64>| img.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();

    // the criterion-5 configuration, truncated for speed
    let clean = shapes::<f64>(128, 128);
    let noisy_a = add_noise(&clean, NoiseModel::Gaussian { sigma: 10.0 }, 7).unwrap();
    let noisy_b = add_noise(&clean, NoiseModel::Gaussian { sigma: 10.0 }, 7).unwrap();
    assert_eq!(bits(&noisy_a), bits(&noisy_b), "noise generator not reproducible");

    let spec = CurvatureSpec::on_unit_range(CurvatureKind::Mean, WeightKind::Tac, 0.1);
    let mut cfg = SolverConfig::l2(0.09, 0.01, spec);
    cfg.tol = 3e-5;
    cfg.max_iter = 25;
    cfg.track_delta_k = true;
    let run_a = admm_solve(&noisy_a, &cfg).unwrap();
    let run_b = admm_solve(&noisy_b, &cfg).unwrap();
    assert_eq!(bits(&run_a.restored), bits(&run_b.restored), "restored images differ");
    assert_trace_numerics_identical(&run_a.trace, &run_b.trace);

    // a two-split fidelity as well
    let mask = random_missing_mask(64, 64, 0.1, 3).unwrap();
    let small = shapes::<f64>(64, 64);
    let spec = CurvatureSpec::on_unit_range(CurvatureKind::Gaussian, WeightKind::Tac, 5.0);
    let mut cfg = SolverConfig::inpaint(10.0, 0.5, 0.1, mask, spec);
    cfg.tol = 5e-4;
    let run_a = admm_solve(&small, &cfg).unwrap();
    let run_b = admm_solve(&small, &cfg).unwrap();
    assert_eq!(bits(&run_a.restored), bits(&run_b.restored));
    assert_trace_numerics_identical(&run_a.trace, &run_b.trace);

    let elapsed = started.elapsed().as_secs_f64();
    println!("criterion 12 (determinism): PASS - bit-identical images and traces across reruns, {elapsed:.2}s");
}
