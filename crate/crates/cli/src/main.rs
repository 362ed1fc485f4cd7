//! `curvtv`: curvature-weighted total-variation image reconstruction.
//!
//! Subcommands: `denoise` (Gaussian / impulse / Poisson noise), `inpaint`,
//! `curvature-map`, `metrics`, `noise` (synthetic degradation) and `bench`
//! (parameter-suite sweep over a built-in synthetic scene).
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use curvtv_core::curvature::{curvature_map, CurvatureKind, CurvatureSpec, WeightKind};
use curvtv_core::image::Image;
use curvtv_core::metrics;
use curvtv_core::noise::{add_noise, NoiseModel};
use curvtv_core::solver::{admm_solve, solve_color, Fidelity, IterationTrace, SolverConfig};
use curvtv_core::synth;

#[derive(Parser)]
#[command(
    name = "curvtv",
    version,
    about = "Image reconstruction by curvature-weighted total-variation minimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Restore a noisy image (Gaussian, impulse or Poisson noise)
    Denoise(DenoiseArgs),
    /// Fill missing pixels given an observation mask
    Inpaint(InpaintArgs),
    /// Compute and export the mean- or Gaussian-curvature map of an image
    CurvatureMap(CurvatureMapArgs),
    /// Report PSNR and SSIM between a reference and a test image
    Metrics(MetricsArgs),
    /// Degrade an image with synthetic noise, reproducibly
    Noise(NoiseArgs),
    /// Sweep the built-in parameter suites over a synthetic scene
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FidelityArg {
    L2,
    L1,
    Kl,
    Inpaint,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurvatureArg {
    /// mean curvature
    Mc,
    /// Gaussian curvature
    Gc,
}

impl From<CurvatureArg> for CurvatureKind {
    fn from(arg: CurvatureArg) -> Self {
        match arg {
            CurvatureArg::Mc => CurvatureKind::Mean,
            CurvatureArg::Gc => CurvatureKind::Gaussian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    /// 1 + alpha |kappa|
    Tac,
    /// 1 + alpha kappa^2
    Tsc,
    /// sqrt(1 + alpha kappa^2)
    Trv,
    /// plain TV (weights identically 1)
    Tv,
}

impl From<WeightArg> for WeightKind {
    fn from(arg: WeightArg) -> Self {
        match arg {
            WeightArg::Tac => WeightKind::Tac,
            WeightArg::Tsc => WeightKind::Tsc,
            WeightArg::Trv => WeightKind::Trv,
            WeightArg::Tv => WeightKind::Tv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    #[value(alias = "salt_pepper")]
    SaltPepper,
    Poisson,
}

/// Solver flags shared by `denoise` and `inpaint`.
#[derive(Args)]
struct SolverArgs {
    /// Fidelity weight lambda
    #[arg(long)]
    lambda: f64,

    /// Curvature-arclength balance alpha (ignored with --g tv)
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,

    /// Penalty mu for the gradient split (mu1 in two-split models)
    #[arg(long)]
    mu: f64,

    /// Penalty mu2 for the fidelity split (required for l1/kl/inpaint)
    #[arg(long)]
    mu2: Option<f64>,

    /// Proximal weight on u
    #[arg(long, default_value_t = 0.0)]
    tau: f64,

    /// Proximal weight on v
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,

    /// Iteration cap T_max
    #[arg(long, default_value_t = 300)]
    max_iter: usize,

    /// Relative-change stopping threshold
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,

    /// Curvature type feeding the weights
    #[arg(long, value_enum, default_value_t = CurvatureArg::Gc)]
    curvature: CurvatureArg,

    /// Weight function g(kappa)
    #[arg(long = "g", value_enum, default_value_t = WeightArg::Tac)]
    g: WeightArg,

    /// Write the per-iteration trace (CSV) here; color images get
    /// -r/-g/-b suffixes
    #[arg(long)]
    trace: Option<PathBuf>,

    /// Run the solve on intensities divided by 255 and rescale the result;
    /// the impulse-noise (l1) reference parameters assume this convention
    #[arg(long)]
    unit_scale: bool,
}

impl SolverArgs {
    fn config(&self, fidelity: Fidelity) -> SolverConfig<f64> {
        // with --unit-scale the data is already on [0, 1], so the curvature
        // geometry needs no further projection
        let curvature = if self.unit_scale {
            CurvatureSpec::new(self.curvature.into(), self.g.into(), self.alpha)
        } else {
            CurvatureSpec::on_unit_range(self.curvature.into(), self.g.into(), self.alpha)
        };
        SolverConfig {
            lambda: self.lambda,
            mu: self.mu,
            mu2: self.mu2,
            tau: self.tau,
            sigma: self.sigma,
            max_iter: self.max_iter,
            tol: self.tol,
            curvature,
            fidelity,
            track_delta_k: false,
        }
    }
}

#[derive(Args)]
struct DenoiseArgs {
    /// Degraded input image
    #[arg(long = "in")]
    input: PathBuf,

    /// Restored output image
    #[arg(long)]
    out: PathBuf,

    /// Clean reference; prints PSNR/SSIM of the restoration when given
    #[arg(long = "ref")]
    reference: Option<PathBuf>,

    /// Data-fidelity term
    #[arg(long, value_enum, default_value_t = FidelityArg::L2)]
    fidelity: FidelityArg,

    /// Observation mask (white = observed), required with --fidelity inpaint
    #[arg(long)]
    mask: Option<PathBuf>,

    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct InpaintArgs {
    /// Image with missing data
    #[arg(long = "in")]
    input: PathBuf,

    /// Observation mask (white = observed, black = hole)
    #[arg(long)]
    mask: PathBuf,

    /// Reconstructed output image
    #[arg(long)]
    out: PathBuf,

    /// Ground-truth reference; prints PSNR/SSIM when given
    #[arg(long = "ref")]
    reference: Option<PathBuf>,

    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct CurvatureMapArgs {
    /// Input image (single channel)
    #[arg(long = "in")]
    input: PathBuf,

    /// Curvature type
    #[arg(long, value_enum, default_value_t = CurvatureArg::Mc)]
    curvature: CurvatureArg,

    /// Rescaled 8-bit visualization output
    #[arg(long)]
    out: Option<PathBuf>,

    /// Full-precision text-grid output
    #[arg(long)]
    raw: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Reference image
    #[arg(long = "ref")]
    reference: PathBuf,

    /// Image under test
    #[arg(long = "test")]
    test: PathBuf,
}

#[derive(Args)]
struct NoiseArgs {
    /// Clean input image
    #[arg(long = "in")]
    input: PathBuf,

    /// Degraded output image
    #[arg(long)]
    out: PathBuf,

    /// Noise model
    #[arg(long, value_enum)]
    model: NoiseArg,

    /// Gaussian standard deviation (0-255 scale)
    #[arg(long, default_value_t = 10.0)]
    sigma_noise: f64,

    /// Fraction of pixels corrupted by salt-and-pepper noise
    #[arg(long, default_value_t = 0.3)]
    fraction: f64,

    /// RNG seed; equal seeds give bit-identical outputs
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Report file (CSV); stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Side length of the synthetic test scene
    #[arg(long, default_value_t = 128)]
    size: usize,

    /// Noise seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Iteration cap per case
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Denoise(args) => denoise(args),
        Command::Inpaint(args) => inpaint(args),
        Command::CurvatureMap(args) => curvature_command(args),
        Command::Metrics(args) => metrics_command(args),
        Command::Noise(args) => noise_command(args),
        Command::Bench(args) => bench_command(args),
    }
}

fn stringify(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn print_quality(reference: &Path, restored: &Image<f64>) -> Result<(), String> {
    let clean: Image<f64> = curvtv_io::load_image(reference).map_err(stringify)?;
    let psnr = metrics::psnr(&clean, restored).map_err(stringify)?;
    let ssim = metrics::ssim(&clean, restored).map_err(stringify)?;
    println!("PSNR: {psnr:.4} dB");
    println!("SSIM: {ssim:.6}");
    Ok(())
}

fn trace_path_for_channel(base: &Path, channel: usize) -> PathBuf {
    let suffix = ["-r", "-g", "-b"][channel];
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn write_traces(
    trace_arg: &Option<PathBuf>,
    traces: &[&IterationTrace<f64>],
) -> Result<(), String> {
    if let Some(path) = trace_arg {
        if traces.len() == 1 {
            curvtv_io::write_trace(traces[0], path).map_err(stringify)?;
        } else {
            for (c, trace) in traces.iter().enumerate() {
                curvtv_io::write_trace(*trace, trace_path_for_channel(path, c))
                    .map_err(stringify)?;
            }
        }
    }
    Ok(())
}

fn rescaled(img: &Image<f64>, factor: f64) -> Result<Image<f64>, String> {
    Image::new(
        img.width(),
        img.height(),
        img.channels(),
        img.data().iter().map(|v| v * factor).collect(),
    )
    .map_err(stringify)
}

fn solve_and_report(
    input: &Path,
    out: &Path,
    reference: &Option<PathBuf>,
    solver: &SolverArgs,
    cfg: SolverConfig<f64>,
) -> Result<(), String> {
    let mut degraded: Image<f64> = curvtv_io::load_image(input).map_err(stringify)?;
    if solver.unit_scale {
        degraded = rescaled(&degraded, 1.0 / 255.0)?;
    }
    let started = Instant::now();
    let (restored, iterations, converged, traces): (Image<f64>, usize, bool, Vec<IterationTrace<f64>>) =
        if degraded.channels() == 3 {
            let result = solve_color(&degraded, &cfg).map_err(stringify)?;
            let traces = result.per_channel.iter().map(|r| r.trace.clone()).collect();
            (
                result.restored.clone(),
                result.iterations_used(),
                result.converged(),
                traces,
            )
        } else {
            let result = admm_solve(&degraded, &cfg).map_err(stringify)?;
            (result.restored, result.iterations_used, result.converged, vec![result.trace])
        };
    let elapsed = started.elapsed().as_secs_f64();
    let restored = if solver.unit_scale { rescaled(&restored, 255.0)? } else { restored };
    curvtv_io::save_image(&restored, out).map_err(stringify)?;
    println!(
        "{}: {} iterations, {} in {elapsed:.2} s",
        out.display(),
        iterations,
        if converged { "converged" } else { "iteration cap reached" }
    );
    write_traces(&solver.trace, &traces.iter().collect::<Vec<_>>())?;
    if let Some(reference) = reference {
        print_quality(reference, &restored)?;
    }
    Ok(())
}

fn denoise(args: DenoiseArgs) -> Result<(), String> {
    let fidelity = match args.fidelity {
        FidelityArg::L2 => Fidelity::L2,
        FidelityArg::L1 => Fidelity::L1,
        FidelityArg::Kl => Fidelity::Kl,
        FidelityArg::Inpaint => {
            let mask_path = args
                .mask
                .as_ref()
                .ok_or_else(|| "--fidelity inpaint requires --mask".to_string())?;
            Fidelity::Inpaint(curvtv_io::load_mask(mask_path).map_err(stringify)?)
        }
    };
    let cfg = args.solver.config(fidelity);
    solve_and_report(&args.input, &args.out, &args.reference, &args.solver, cfg)
}

fn inpaint(args: InpaintArgs) -> Result<(), String> {
    let mask = curvtv_io::load_mask(&args.mask).map_err(stringify)?;
    let cfg = args.solver.config(Fidelity::Inpaint(mask));
    solve_and_report(&args.input, &args.out, &args.reference, &args.solver, cfg)
}

fn curvature_command(args: CurvatureMapArgs) -> Result<(), String> {
    if args.out.is_none() && args.raw.is_none() {
        return Err("curvature-map needs --out and/or --raw".into());
    }
    let img: Image<f64> = curvtv_io::load_image(&args.input).map_err(stringify)?;
    let spec = CurvatureSpec::on_unit_range(args.curvature.into(), WeightKind::Tv, 0.0);
    let map = curvature_map(&img, &spec).map_err(stringify)?;
    if let Some(out) = &args.out {
        curvtv_io::save_curvature_image(&map, out).map_err(stringify)?;
    }
    if let Some(raw) = &args.raw {
        curvtv_io::write_grid(&map, raw).map_err(stringify)?;
    }
    Ok(())
}

fn metrics_command(args: MetricsArgs) -> Result<(), String> {
    let reference: Image<f64> = curvtv_io::load_image(&args.reference).map_err(stringify)?;
    let test: Image<f64> = curvtv_io::load_image(&args.test).map_err(stringify)?;
    let report = metrics::report(&reference, &test).map_err(stringify)?;
    println!("PSNR: {:.4} dB", report.psnr);
    println!("SSIM: {:.6}", report.ssim);
    Ok(())
}

fn noise_command(args: NoiseArgs) -> Result<(), String> {
    let clean: Image<f64> = curvtv_io::load_image(&args.input).map_err(stringify)?;
    let model = match args.model {
        NoiseArg::Gaussian => NoiseModel::Gaussian { sigma: args.sigma_noise },
        NoiseArg::SaltPepper => NoiseModel::SaltPepper { fraction: args.fraction },
        NoiseArg::Poisson => NoiseModel::Poisson,
    };
    let noisy = add_noise(&clean, model, args.seed).map_err(stringify)?;
    curvtv_io::save_image(&noisy, &args.out).map_err(stringify)?;
    Ok(())
}

/// Reference parameter suites: sigma 10 pairs with the smooth-image setup,
/// sigma 20 with the natural-image one.
fn bench_suite(sigma: f64) -> (f64, f64, f64, f64, f64) {
    // (lambda, mu, alpha_mc, alpha_gc, tol)
    if sigma <= 15.0 {
        (0.09, 0.01, 0.1, 5.0, 4e-4)
    } else {
        (0.07, 2.0, 0.5, 5.0, 3e-5)
    }
}

fn bench_command(args: BenchArgs) -> Result<(), String> {
    let clean = synth::shapes::<f64>(args.size, args.size);
    let methods: [(&str, WeightKind, Option<CurvatureKind>); 7] = [
        ("tv", WeightKind::Tv, None),
        ("tac-mc", WeightKind::Tac, Some(CurvatureKind::Mean)),
        ("tac-gc", WeightKind::Tac, Some(CurvatureKind::Gaussian)),
        ("tsc-mc", WeightKind::Tsc, Some(CurvatureKind::Mean)),
        ("tsc-gc", WeightKind::Tsc, Some(CurvatureKind::Gaussian)),
        ("trv-mc", WeightKind::Trv, Some(CurvatureKind::Mean)),
        ("trv-gc", WeightKind::Trv, Some(CurvatureKind::Gaussian)),
    ];

    let mut rows = String::from("image,sigma,method,psnr,ssim,iterations,time_ms\n");
    for sigma in [10.0, 20.0] {
        let noisy = add_noise(&clean, NoiseModel::Gaussian { sigma }, args.seed)
            .map_err(stringify)?;
        let (lambda, mu, alpha_mc, alpha_gc, tol) = bench_suite(sigma);
        for (name, weight, kind) in methods {
            let curvature_kind = kind.unwrap_or(CurvatureKind::Mean);
            let alpha = match (weight, curvature_kind) {
                (WeightKind::Tv, _) => 0.0,
                (_, CurvatureKind::Mean) => alpha_mc,
                (_, CurvatureKind::Gaussian) => alpha_gc,
            };
            let mut cfg = SolverConfig::l2(
                lambda,
                mu,
                CurvatureSpec::on_unit_range(curvature_kind, weight, alpha),
            );
            cfg.tol = tol;
            cfg.max_iter = args.max_iter;
            let started = Instant::now();
            let result = admm_solve(&noisy, &cfg).map_err(stringify)?;
            let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
            let psnr = metrics::psnr(&clean, &result.restored).map_err(stringify)?;
            let ssim = metrics::ssim(&clean, &result.restored).map_err(stringify)?;
            rows.push_str(&format!(
                "shapes{size},{sigma},{name},{psnr:.4},{ssim:.6},{iters},{elapsed_ms:.1}\n",
                size = args.size,
                iters = result.iterations_used,
            ));
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, rows).map_err(stringify)?,
        None => print!("{rows}"),
    }
    Ok(())
}
