//! Slow, literal reference implementations used to check the fast paths.
//!
//! Nothing here touches an FFT. Inputs are capped at [`ORACLE_CAP`] elements
//! per plane so a mistaken call cannot stall a test run.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::features::FeaturePatch;
use crate::spectral::{RealPlane, SpectralPlane};

pub const ORACLE_CAP: usize = 64;

fn cap(len: usize) -> Result<()> {
    if len > ORACLE_CAP {
        return Err(Error::OracleTooLarge { len, cap: ORACLE_CAP });
    }
    Ok(())
}

/// Block-circulant matrix generated by a base plane: entry
/// `((r1,c1),(r2,c2)) = base[(r2−r1) mod h][(c2−c1) mod w]`. A 1-D base row is
/// the `h = 1` case.
#[derive(Clone, Debug)]
pub struct CirculantMatrix {
    pub base: Vec<f64>,
    pub width: usize,
    pub height: usize,
}

impl CirculantMatrix {
    pub fn from_row(base_row: &[f64]) -> Result<Self> {
        Self::from_plane(base_row, base_row.len(), 1)
    }

    pub fn from_plane(base: &[f64], width: usize, height: usize) -> Result<Self> {
        if base.is_empty() || base.len() != width * height {
            return Err(Error::Dimension(format!("circulant base of {} for {width}x{height}", base.len())));
        }
        cap(base.len())?;
        Ok(Self { base: base.to_vec(), width, height })
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let (w, h) = (self.width, self.height);
        DMatrix::from_fn(self.n(), self.n(), |i, j| {
            let (r1, c1) = (i / w, i % w);
            let (r2, c2) = (j / w, j % w);
            let r = (r2 + h - r1) % h;
            let c = (c2 + w - c1) % w;
            self.base[r * w + c]
        })
    }
}

fn solve(a: DMatrix<f64>, b: DVector<f64>) -> Result<Vec<f64>> {
    let x = a.lu().solve(&b).ok_or(Error::Singular)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(x.iter().copied().collect())
}

/// `α = (K + λI)⁻¹ y` by dense LU, with `K` circulant in `base_row`.
pub fn dense_ridge_solve(base_row: &[f64], y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    dense_ridge_solve_2d(base_row, base_row.len(), 1, y, lambda)
}

pub fn dense_ridge_solve_2d(
    base: &[f64],
    width: usize,
    height: usize,
    y: &[f64],
    lambda: f64,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda {lambda}")));
    }
    let k = CirculantMatrix::from_plane(base, width, height)?;
    if y.len() != k.n() {
        return Err(Error::Dimension("label length".into()));
    }
    let a = k.dense() + DMatrix::identity(k.n(), k.n()) * lambda;
    solve(a, DVector::from_column_slice(y))
}

/// Dense solve of `(λI + 4λsI + K) α = y + 4λs α_prev`.
pub fn dense_oct_solve(base_row: &[f64], y: &[f64], prev_alpha: &[f64], lambda: f64, s: f64) -> Result<Vec<f64>> {
    dense_oct_solve_2d(base_row, base_row.len(), 1, y, prev_alpha, lambda, s)
}

pub fn dense_oct_solve_2d(
    base: &[f64],
    width: usize,
    height: usize,
    y: &[f64],
    prev_alpha: &[f64],
    lambda: f64,
    s: f64,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0) || !(s >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda {lambda}, s {s}")));
    }
    let k = CirculantMatrix::from_plane(base, width, height)?;
    let n = k.n();
    if y.len() != n || prev_alpha.len() != n {
        return Err(Error::Dimension("rhs length".into()));
    }
    let penalty = 4.0 * lambda * s;
    let a = k.dense() + DMatrix::identity(n, n) * (lambda + penalty);
    let rhs = DVector::from_fn(n, |i, _| y[i] + penalty * prev_alpha[i]);
    solve(a, rhs)
}

/// Kernel over all cyclic shifts by direct summation:
/// `k[dy][dx] = exp(−‖x − shift(x', (dx,dy))‖² / (σ²·N))`, where
/// `shift(x', d)[n] = x'[n − d]` and `N` counts all feature values.
pub fn naive_kernel_correlation(x: &FeaturePatch<f64>, xp: &FeaturePatch<f64>, sigma: f64) -> Result<RealPlane<f64>> {
    if !x.same_shape(xp) {
        return Err(Error::Dimension("kernel operands differ".into()));
    }
    cap(x.plane_len())?;
    let (w, h, ch) = (x.width(), x.height(), x.channels());
    let n = (w * h * ch) as f64;
    Ok(RealPlane::from_fn(w, h, |dy, dx| {
        let mut dist = 0.0;
        for c in 0..ch {
            for r in 0..h {
                for k in 0..w {
                    let sr = (r + h - dy) % h;
                    let sk = (k + w - dx) % w;
                    let d = x.get(c, r, k) - xp.get(c, sr, sk);
                    dist += d * d;
                }
            }
        }
        (-dist / (sigma * sigma * n)).exp()
    }))
}

/// Response over all cyclic shifts by direct summation:
/// `r[s] = Σ_m α[m]·κ(z, shift(x̂, s − m))`.
pub fn naive_detect_response(
    alpha: &[f64],
    z: &FeaturePatch<f64>,
    appearance: &FeaturePatch<f64>,
    sigma: f64,
) -> Result<RealPlane<f64>> {
    let k = naive_kernel_correlation(z, appearance, sigma)?;
    if alpha.len() != k.len() {
        return Err(Error::Dimension("alpha length".into()));
    }
    naive_circular_convolution(&k, &RealPlane::new(k.width(), k.height(), alpha.to_vec())?)
}

/// `(a ⊛ b)[s] = Σ_m a[s − m]·b[m]` with cyclic indexing.
pub fn naive_circular_convolution(a: &RealPlane<f64>, b: &RealPlane<f64>) -> Result<RealPlane<f64>> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::Dimension("convolution operands differ".into()));
    }
    cap(a.len())?;
    let (w, h) = (a.width(), a.height());
    Ok(RealPlane::from_fn(w, h, |sr, sc| {
        let mut acc = 0.0;
        for mr in 0..h {
            for mc in 0..w {
                acc += a.get((sr + h - mr) % h, (sc + w - mc) % w) * b.get(mr, mc);
            }
        }
        acc
    }))
}

/// Unnormalized forward DFT by the double sum over all pixels.
pub fn naive_dft(plane: &RealPlane<f64>) -> Result<SpectralPlane<f64>> {
    cap(plane.len())?;
    let input: Vec<Complex<f64>> = plane.data().iter().map(|&v| Complex::new(v, 0.0)).collect();
    naive_transform(&input, plane.width(), plane.height(), -1.0, 1.0)
}

/// Inverse DFT with `1/(W·H)` scaling, by the double sum.
pub fn naive_idft(sp: &SpectralPlane<f64>) -> Result<SpectralPlane<f64>> {
    cap(sp.data().len())?;
    let n = (sp.width() * sp.height()) as f64;
    naive_transform(sp.data(), sp.width(), sp.height(), 1.0, 1.0 / n)
}

fn naive_transform(
    input: &[Complex<f64>],
    w: usize,
    h: usize,
    sign: f64,
    scale: f64,
) -> Result<SpectralPlane<f64>> {
    let tau = std::f64::consts::TAU;
    let mut out = Vec::with_capacity(w * h);
    for u in 0..h {
        for v in 0..w {
            let mut acc = Complex::new(0.0, 0.0);
            for r in 0..h {
                for c in 0..w {
                    let phase = sign * tau * ((u * r) as f64 / h as f64 + (v * c) as f64 / w as f64);
                    acc += input[r * w + c] * Complex::from_polar(1.0, phase);
                }
            }
            out.push(acc * scale);
        }
    }
    SpectralPlane::new(w, h, out)
}

/// Arithmetic mean and population variance.
pub fn batch_stats(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::Empty("sample list"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var))
}
