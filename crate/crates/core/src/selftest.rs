//! Oracle-equivalence checks on seeded random instances.
//!
//! Each check compares a fast path against the literal implementations in
//! [`crate::oracle`] and reports the worst deviation it saw. [`run_all`]
//! runs every check with the default instance counts and tolerances.

use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::features::FeaturePatch;
use crate::geometry::Point;
use crate::kcf::{gaussian_correlation, kernel_spectrum, ridge_alpha, train};
use crate::oct::{compute_eta, is_drifting, oct_update, solve_oct_alpha, stats_update, ResponseStats, SIGMA_FLOOR};
use crate::oracle;
use crate::redetect::{polar_angle, polar_candidates};
use crate::spectral::{fft2, ifft2, FftEngine, RealPlane, SpectralPlane};

const SEED: u64 = 0x5eed;
const KERNEL_SIGMA: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation observed (0 for exact checks).
    pub worst: f64,
    pub tolerance: f64,
    pub instances: usize,
}

impl CheckOutcome {
    fn new(name: &'static str, worst: f64, tolerance: f64, instances: usize) -> Self {
        // NaN never passes
        Self { name, passed: worst <= tolerance, worst, tolerance, instances }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} worst {:.3e} (tol {:.0e}, {} instances)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.instances
        )
    }
}

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> RealPlane<f64> {
    RealPlane::from_fn(w, h, |_, _| rng.gen_range(-1.0..1.0))
}

fn random_patch(rng: &mut ChaCha8Rng, w: usize, h: usize, channels: usize) -> FeaturePatch<f64> {
    let data = (0..w * h * channels).map(|_| rng.gen_range(0.0..1.0)).collect();
    FeaturePatch::new(w, h, channels, data).expect("consistent shape")
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::NAN;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_diff_complex(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::NAN;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Forward and inverse FFT against the double-sum DFT on planes up to
/// `max_side × max_side`.
pub fn check_fft(instances: usize, max_side: usize, tol: f64) -> Result<CheckOutcome> {
    let mut rng = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let (w, h) = (rng.gen_range(1..=max_side), rng.gen_range(1..=max_side));
        let p = random_plane(&mut rng, w, h);
        let fast = fft2(&p);
        let slow = oracle::naive_dft(&p)?;
        worst = worst.max(max_diff_complex(fast.data(), slow.data()));
        let back = oracle::naive_idft(&fast)?;
        let re: Vec<f64> = back.data().iter().map(|c| c.re).collect();
        worst = worst.max(max_diff(ifft2(&fast).data(), &re));
        worst = worst.max(max_diff(ifft2(&fast).data(), p.data()));
    }
    Ok(CheckOutcome::new("fft_vs_naive_dft", worst, tol, instances))
}

/// `Σ|x|² = Σ|F(x)|² / (W·H)`, relative error.
pub fn check_parseval(instances: usize, max_side: usize, tol: f64) -> Result<CheckOutcome> {
    let mut rng = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let (w, h) = (rng.gen_range(1..=max_side), rng.gen_range(1..=max_side));
        let p = random_plane(&mut rng, w, h);
        let energy: f64 = p.data().iter().map(|v| v * v).sum();
        let spectral: f64 = fft2(&p).data().iter().map(|c| c.norm_sqr()).sum::<f64>() / (w * h) as f64;
        worst = worst.max((energy - spectral).abs() / energy.max(f64::MIN_POSITIVE));
    }
    Ok(CheckOutcome::new("parseval", worst, tol, instances))
}

fn lambda_for(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-3.0..0.0))
}

/// FFT-domain ridge training against a dense solve of `(K + λI)α = y` on
/// grayscale features: `n_1d` instances of length ≤ `max_len` and `n_2d`
/// instances up to `max_side × max_side`.
pub fn check_ridge(n_1d: usize, max_len: usize, n_2d: usize, max_side: usize, tol: f64) -> Result<CheckOutcome> {
    let mut rng = rng(3);
    let mut worst: f64 = 0.0;
    for i in 0..n_1d + n_2d {
        let (w, h) = if i < n_1d {
            (rng.gen_range(1..=max_len), 1)
        } else {
            (rng.gen_range(1..=max_side), rng.gen_range(1..=max_side))
        };
        let x = random_patch(&mut rng, w, h, 1);
        let y = random_plane(&mut rng, w, h);
        let lambda = lambda_for(&mut rng);

        let engine = FftEngine::new(w, h);
        let alpha_hat = train(&engine, &x, &engine.forward(&y)?, lambda, KERNEL_SIGMA)?;
        let fast = engine.inverse(&alpha_hat)?;

        let base = oracle::naive_kernel_correlation(&x, &x, KERNEL_SIGMA)?;
        let dense = oracle::dense_ridge_solve_2d(base.data(), w, h, y.data(), lambda)?;
        worst = worst.max(max_diff(fast.data(), &dense));
    }
    Ok(CheckOutcome::new("ridge_vs_dense_solve", worst, tol, n_1d + n_2d))
}

/// Direct constrained solve against the dense system
/// `(λ + 4λs + K)α = y + 4λs·α_prev` for every `s` in `s_values`.
pub fn check_oct_dense(
    n_1d: usize,
    max_len: usize,
    n_2d: usize,
    max_side: usize,
    s_values: &[f64],
    tol: f64,
) -> Result<CheckOutcome> {
    let mut rng = rng(4);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for i in 0..n_1d + n_2d {
        let (w, h) = if i < n_1d {
            (rng.gen_range(1..=max_len), 1)
        } else {
            (rng.gen_range(1..=max_side), rng.gen_range(1..=max_side))
        };
        let x = random_patch(&mut rng, w, h, 1);
        let y = random_plane(&mut rng, w, h);
        let prev = random_plane(&mut rng, w, h);
        let lambda = lambda_for(&mut rng);

        let engine = FftEngine::new(w, h);
        let k_spec = kernel_spectrum(&engine, &x, KERNEL_SIGMA)?;
        let base = oracle::naive_kernel_correlation(&x, &x, KERNEL_SIGMA)?;
        for &s in s_values {
            let spec = solve_oct_alpha(&k_spec, &engine.forward(&y)?, &engine.forward(&prev)?, lambda, s)?;
            let fast = engine.inverse(&spec)?;
            let dense = oracle::dense_oct_solve_2d(base.data(), w, h, y.data(), prev.data(), lambda, s)?;
            worst = worst.max(max_diff(fast.data(), &dense));
            count += 1;
        }
    }
    Ok(CheckOutcome::new("oct_vs_dense_solve", worst, tol, count))
}

fn random_spectrum(rng: &mut ChaCha8Rng, w: usize, h: usize) -> SpectralPlane<f64> {
    let data = (0..w * h).map(|_| Complex::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).collect();
    SpectralPlane::new(w, h, data).expect("consistent shape")
}

/// Direct constrained solve against the η-blend of the ridge solution with
/// the previous filter.
pub fn check_oct_paths(instances: usize, tol: f64) -> Result<CheckOutcome> {
    let mut rng = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let (w, h) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let channels = rng.gen_range(1..=3);
        let x = random_patch(&mut rng, w, h, channels);
        let engine = FftEngine::new(w, h);
        let k = kernel_spectrum(&engine, &x, KERNEL_SIGMA)?;
        let y = random_spectrum(&mut rng, w, h);
        let prev = random_spectrum(&mut rng, w, h);
        let lambda = 10f64.powf(rng.gen_range(-5.0..-1.0));
        let s = [0.0, 1.0, 1000.0][rng.gen_range(0..3)];
        let direct = solve_oct_alpha(&k, &y, &prev, lambda, s)?;
        let blended = oct_update(&prev, &ridge_alpha(&k, &y, lambda)?, &compute_eta(&k, lambda, s)?)?;
        let scale = direct.data().iter().map(|c| c.norm()).fold(1.0, f64::max);
        worst = worst.max(max_diff_complex(direct.data(), blended.data()) / scale);
    }
    Ok(CheckOutcome::new("oct_direct_vs_blend", worst, tol, instances))
}

/// With `s = 0`, η is exactly one and the blended update reproduces
/// per-frame retraining bit for bit over a stream of `frames` samples.
pub fn check_s_zero_degeneration(frames: usize) -> Result<CheckOutcome> {
    let mut rng = rng(6);
    let (w, h) = (8, 6);
    let engine = FftEngine::new(w, h);
    let y = engine.forward(&random_plane(&mut rng, w, h))?;
    let lambda = 1e-4;
    let mut alpha = train(&engine, &random_patch(&mut rng, w, h, 2), &y, lambda, KERNEL_SIGMA)?;
    let mut mismatches = 0usize;
    for _ in 0..frames {
        let x = random_patch(&mut rng, w, h, 2);
        let k = kernel_spectrum(&engine, &x, KERNEL_SIGMA)?;
        let eta = compute_eta(&k, lambda, 0.0)?;
        mismatches += eta.data().iter().filter(|e| **e != Complex::new(1.0, 0.0)).count();
        let retrained = ridge_alpha(&k, &y, lambda)?;
        alpha = oct_update(&alpha, &retrained, &eta)?;
        mismatches += alpha.data().iter().zip(retrained.data()).filter(|(a, b)| a != b).count();
    }
    Ok(CheckOutcome::new("s_zero_is_retraining", mismatches as f64, 0.0, frames))
}

/// FFT Gaussian correlation against the all-shifts double loop on
/// `side × side × channels` pairs, plus the exact zero-shift self value.
pub fn check_kernel(instances: usize, side: usize, max_channels: usize, tol: f64, self_tol: f64) -> Result<[CheckOutcome; 2]> {
    let mut rng = rng(7);
    let engine = FftEngine::new(side, side);
    let mut worst: f64 = 0.0;
    let mut worst_self: f64 = 0.0;
    for _ in 0..instances {
        let ch = rng.gen_range(1..=max_channels);
        let x = random_patch(&mut rng, side, side, ch);
        let xp = random_patch(&mut rng, side, side, ch);
        let fast = gaussian_correlation(&engine, &x, &xp, KERNEL_SIGMA)?;
        let slow = oracle::naive_kernel_correlation(&x, &xp, KERNEL_SIGMA)?;
        worst = worst.max(max_diff(fast.data(), slow.data()));
        let auto = gaussian_correlation(&engine, &x, &x, KERNEL_SIGMA)?;
        worst_self = worst_self.max((auto.get(0, 0) - 1.0).abs());
    }
    Ok([
        CheckOutcome::new("kernel_vs_all_shifts", worst, tol, instances),
        CheckOutcome::new("kernel_self_zero_shift", worst_self, self_tol, instances),
    ])
}

/// Running mean/variance against batch statistics on `streams` streams of
/// `len` samples, relative to the sample scale.
pub fn check_running_stats(streams: usize, len: usize, tol: f64) -> Result<CheckOutcome> {
    let mut rng = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..streams {
        let center = rng.gen_range(-10.0..10.0);
        let spread = rng.gen_range(0.01..5.0);
        let samples: Vec<f64> = (0..len).map(|_| center + spread * rng.gen_range(-1.0..1.0)).collect();
        let mut st = ResponseStats::new(1);
        for &v in &samples {
            st = stats_update(&st, v)?;
        }
        let (mean, var) = oracle::batch_stats(&samples)?;
        worst = worst.max((st.mean - mean).abs() / mean.abs().max(1.0));
        worst = worst.max((st.variance - var).abs() / var.max(1.0));
    }
    Ok(CheckOutcome::new("running_stats_vs_batch", worst, tol, streams))
}

/// The gate against `|ŷ − μ| / max(σ, floor) ≥ t_g` on random triples.
pub fn check_gate(triples: usize, t_g: f64) -> Result<CheckOutcome> {
    let mut rng = rng(9);
    let mut mismatches = 0usize;
    for i in 0..triples {
        let mu = rng.gen_range(-2.0..2.0);
        let sigma = if i % 50 == 0 { 0.0 } else { rng.gen_range(0.0..1.0) };
        let y = if i % 7 == 0 { mu + t_g * sigma } else { mu + rng.gen_range(-4.0..4.0) * sigma.max(0.1) };
        let st = ResponseStats { mean: mu, variance: sigma * sigma, count: 10, warmup: 5 };
        let expected = (y - mu).abs() / sigma.max(SIGMA_FLOOR) >= t_g;
        if is_drifting(&st, y, t_g) != expected {
            mismatches += 1;
        }
        let cold = ResponseStats { count: 4, ..st };
        if is_drifting(&cold, y, t_g) {
            mismatches += 1;
        }
    }
    Ok(CheckOutcome::new("drift_gate_rule", mismatches as f64, 0.0, triples))
}

/// Point count, ring radii and the two worked angle examples.
pub fn check_polar(tol: f64) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (n_r, n_t, radius) in [(5, 16, 50.0), (3, 7, 12.5), (1, 1, 4.0), (8, 32, 100.0)] {
        let g = polar_candidates(Point::new(3.0, -2.0), radius, n_r, n_t)?;
        if g.points.len() != n_r * n_t {
            return Ok(CheckOutcome::new("polar_grid", f64::INFINITY, tol, count));
        }
        for (i, p) in g.points.iter().enumerate() {
            let ring = (i / n_t + 1) as f64 * radius / n_r as f64;
            worst = worst.max((p.distance(&g.center) - ring).abs());
            let theta = polar_angle(i % n_t + 1, n_t);
            worst = worst.max((p.x - (3.0 + ring * theta.cos())).abs());
        }
        count += 1;
    }
    let g = polar_candidates(Point::new(0.0f64, 0.0), 50.0, 5, 16)?;
    let quarter = g.points[3];
    worst = worst.max(quarter.x.abs()).max((quarter.y - 10.0).abs());
    let a = 3.0 * std::f64::consts::PI / 16.0;
    let first = g.points[0];
    worst = worst.max((first.x - 10.0 * a.cos()).abs()).max((first.y - 10.0 * a.sin()).abs());
    Ok(CheckOutcome::new("polar_grid", worst, tol, count))
}

/// Every check with its default instance family and tolerance.
pub fn run_all() -> Result<Vec<CheckOutcome>> {
    let [kernel, kernel_self] = check_kernel(20, 4, 4, 1e-8, 1e-12)?;
    Ok(vec![
        check_fft(20, 8, 1e-10)?,
        check_parseval(20, 8, 1e-9)?,
        check_ridge(50, 16, 20, 4, 1e-8)?,
        check_oct_dense(50, 16, 20, 4, &[0.0, 1.0, 1000.0], 1e-8)?,
        check_oct_paths(100, 1e-12)?,
        check_s_zero_degeneration(10)?,
        kernel,
        kernel_self,
        check_running_stats(20, 1000, 1e-9)?,
        check_gate(1000, 1.6)?,
        check_polar(1e-9)?,
    ])
}
