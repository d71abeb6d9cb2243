//! Output-constrained filter update and the response drift gate.
//!
//! Constraining the per-frame maximal response to a Gaussian model turns
//! into a penalty on `‖α^t − α^{t−1}‖²` in the dual problem. The resulting
//! normal equations `(λ + 4λs)·α^t + K·α^t = y + 4λs·α^{t−1}` are circulant,
//! so the update is a per-frequency blend
//!
//! ```text
//! F(α^t) = η ⊙ F(α_ridge) + (1 − η) ⊙ F(α^{t−1}),   η = (F(k) + λ) / (F(k) + λ + 4λs)
//! ```
//!
//! with `α_ridge` the unconstrained per-frame solution. `s = 0` gives `η ≡ 1`.
//!
//! The response statistics track the mean and population variance of the
//! detected peak; a frame whose peak has `|ŷ − μ| / σ ≥ T_g` is flagged as
//! drifting.

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{cdiv, SpectralPlane};

/// Lower bound on σ in the drift gate.
pub const SIGMA_FLOOR: f64 = 1e-6;

const DIV_GUARD: f64 = 1e-12;

/// Rule producing the appearance/statistics learning rate for frame `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RhoSchedule {
    /// `ρ_t = 1/t`: running average over all frames so far.
    InverseFrame,
    Constant(f64),
}

impl RhoSchedule {
    /// Rate for 1-based frame number `t`.
    pub fn rate<T: Scalar>(&self, t: usize) -> T {
        match *self {
            RhoSchedule::InverseFrame => T::one() / T::from_usize_lossy(t.max(1)),
            RhoSchedule::Constant(r) => T::lit(r),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OctConfig {
    pub s: f64,
    pub lambda: f64,
    pub t_g: f64,
    pub rho: RhoSchedule,
}

impl Default for OctConfig {
    fn default() -> Self {
        Self { s: 1000.0, lambda: 1e-4, t_g: 1.6, rho: RhoSchedule::InverseFrame }
    }
}

impl OctConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.0) {
            return Err(Error::InvalidParameter(format!("s = {} must be >= 0", self.s)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda = {} must be > 0", self.lambda)));
        }
        if !(self.t_g > 0.0) {
            return Err(Error::InvalidParameter(format!("t_g = {} must be > 0", self.t_g)));
        }
        if let RhoSchedule::Constant(r) = self.rho {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidParameter(format!("rho = {r} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

fn check_params<T: Scalar>(lambda: T, s: T) -> Result<()> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} must be positive")));
    }
    if !(s >= T::zero()) {
        return Err(Error::InvalidParameter(format!("s {s} must be non-negative")));
    }
    Ok(())
}

/// Per-bin blend weight `η = (F(k) + λ) / (F(k) + λ + 4λs)`.
pub fn compute_eta<T: Scalar>(k_spectrum: &SpectralPlane<T>, lambda: T, s: T) -> Result<SpectralPlane<T>> {
    check_params(lambda, s)?;
    let penalty = T::lit(4.0) * lambda * s;
    let num = k_spectrum.map(|k| k + Complex::new(lambda, T::zero()));
    let den = num.map(|v| v + Complex::new(penalty, T::zero()));
    cdiv(&num, &den, T::lit(DIV_GUARD))
}

/// `η ⊙ new + (1 − η) ⊙ prev`, in full complex arithmetic.
pub fn oct_update<T: Scalar>(
    prev_alpha: &SpectralPlane<T>,
    new_alpha: &SpectralPlane<T>,
    eta: &SpectralPlane<T>,
) -> Result<SpectralPlane<T>> {
    if !prev_alpha.same_shape(new_alpha) || !prev_alpha.same_shape(eta) {
        return Err(Error::Dimension("oct_update operands differ in shape".into()));
    }
    let mut out = new_alpha.clone();
    for ((o, &e), &p) in out.data_mut().iter_mut().zip(eta.data()).zip(prev_alpha.data()) {
        *o = e * *o + (Complex::<T>::one() - e) * p;
    }
    Ok(out)
}

/// Direct spectral solve of the constrained normal equations:
/// `(F(y) + 4λs·F(α^{t−1})) / (F(k) + λ + 4λs)`.
pub fn solve_oct_alpha<T: Scalar>(
    k_spectrum: &SpectralPlane<T>,
    y_spectrum: &SpectralPlane<T>,
    prev_alpha: &SpectralPlane<T>,
    lambda: T,
    s: T,
) -> Result<SpectralPlane<T>> {
    check_params(lambda, s)?;
    if !k_spectrum.same_shape(y_spectrum) || !k_spectrum.same_shape(prev_alpha) {
        return Err(Error::Dimension("solve_oct_alpha operands differ in shape".into()));
    }
    let penalty = T::lit(4.0) * lambda * s;
    let num = y_spectrum.zip_with(prev_alpha, |y, p| y + p * penalty)?;
    let den = k_spectrum.map(|k| k + Complex::new(lambda + penalty, T::zero()));
    cdiv(&num, &den, T::lit(DIV_GUARD))
}

/// Running Gaussian model of the per-frame maximal response.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponseStats<T> {
    pub mean: T,
    /// Population variance of the absorbed samples.
    pub variance: T,
    pub count: usize,
    /// Samples required before the gate may fire.
    pub warmup: usize,
}

impl<T: Scalar> ResponseStats<T> {
    pub fn new(warmup: usize) -> Self {
        Self { mean: T::zero(), variance: T::zero(), count: 0, warmup }
    }

    pub fn std_dev(&self) -> T {
        self.variance.max(T::zero()).sqrt()
    }

    pub fn is_warm(&self) -> bool {
        self.count >= self.warmup
    }

    /// `(ŷ − μ) / max(σ, σ_floor)`.
    pub fn z_score(&self, y_hat: T) -> T {
        (y_hat - self.mean) / self.std_dev().max(T::lit(SIGMA_FLOOR))
    }
}

/// Absorbs one sample with `ρ = 1/(count+1)`:
/// `μ ← (1−ρ)μ + ρŷ`, `σ² ← (1−ρ)σ² + ρ(ŷ − μ_new)(ŷ − μ_old)`.
pub fn stats_update<T: Scalar>(stats: &ResponseStats<T>, y_hat: T) -> Result<ResponseStats<T>> {
    if !y_hat.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite response {y_hat}")));
    }
    let count = stats.count + 1;
    let rho = T::one() / T::from_usize_lossy(count);
    let keep = T::one() - rho;
    let mean = keep * stats.mean + rho * y_hat;
    let variance = keep * stats.variance + rho * (y_hat - mean) * (y_hat - stats.mean);
    Ok(ResponseStats { mean, variance: variance.max(T::zero()), count, warmup: stats.warmup })
}

/// True when the response falls outside the Gaussian acceptance band.
/// Never fires before the statistics are warm.
pub fn is_drifting<T: Scalar>(stats: &ResponseStats<T>, y_hat: T, t_g: T) -> bool {
    if !stats.is_warm() {
        return false;
    }
    stats.z_score(y_hat).abs() >= t_g
}
