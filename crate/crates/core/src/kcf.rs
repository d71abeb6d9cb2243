//! Kernelized correlation filter: Gaussian kernel correlation over all cyclic
//! shifts, Fourier-domain ridge regression, detection and the fixed-rate
//! model update.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::features::FeaturePatch;
use crate::scalar::Scalar;
use crate::spectral::{cdiv, FftEngine, RealPlane, SpectralPlane};

/// Guard used by `cdiv` when a denominator is exactly zero.
const DIV_GUARD: f64 = 1e-12;

/// Learned tracker state: dual coefficients in the Fourier domain, the
/// learned appearance, and the cached label spectrum.
#[derive(Clone, Debug)]
pub struct FilterModel<T: Scalar> {
    pub alpha_hat: SpectralPlane<T>,
    pub appearance: FeaturePatch<T>,
    pub label_spectrum: SpectralPlane<T>,
    pub lambda: T,
    pub sigma: T,
}

impl<T: Scalar> FilterModel<T> {
    /// Trains a fresh model on `x`.
    pub fn train_new(
        engine: &FftEngine<T>,
        x: &FeaturePatch<T>,
        label_spectrum: SpectralPlane<T>,
        lambda: T,
        sigma: T,
    ) -> Result<Self> {
        let alpha_hat = train(engine, x, &label_spectrum, lambda, sigma)?;
        Ok(Self { alpha_hat, appearance: x.clone(), label_spectrum, lambda, sigma })
    }
}

/// Outcome of one detection pass.
#[derive(Clone, Debug)]
pub struct Detection<T> {
    pub peak_value: T,
    /// Signed cyclic shift `(dx, dy)` of the peak, in cells.
    pub peak_offset: (isize, isize),
    pub response: RealPlane<T>,
}

fn check_engine<T: Scalar>(engine: &FftEngine<T>, p: &FeaturePatch<T>) -> Result<()> {
    if engine.width() != p.width() || engine.height() != p.height() {
        return Err(Error::Dimension(format!(
            "engine {}x{} vs patch {}x{}",
            engine.width(),
            engine.height(),
            p.width(),
            p.height()
        )));
    }
    Ok(())
}

/// Gaussian kernel between `x` and every cyclic shift of `xp`:
///
/// `k[d] = exp(−max(0, ‖x‖² + ‖x'‖² − 2·c[d]) / (σ²·N))`
///
/// where `c = F⁻¹(Σ_ch F(x_ch) ⊙ conj(F(x'_ch)))` and `N` counts every
/// feature value (cells × channels).
pub fn gaussian_correlation<T: Scalar>(
    engine: &FftEngine<T>,
    x: &FeaturePatch<T>,
    xp: &FeaturePatch<T>,
    sigma: T,
) -> Result<RealPlane<T>> {
    if !x.same_shape(xp) {
        return Err(Error::Dimension(format!(
            "kernel operands {}x{}x{} vs {}x{}x{}",
            x.width(),
            x.height(),
            x.channels(),
            xp.width(),
            xp.height(),
            xp.channels()
        )));
    }
    if !(sigma > T::zero()) {
        return Err(Error::InvalidParameter(format!("kernel sigma {sigma}")));
    }
    check_engine(engine, x)?;

    let (w, h) = (x.width(), x.height());
    let mut cross = SpectralPlane::zeros(w, h);
    for c in 0..x.channels() {
        let fx = engine.forward_slice(x.channel(c));
        let fxp = engine.forward_slice(xp.channel(c));
        for ((acc, a), b) in cross.data_mut().iter_mut().zip(fx.data()).zip(fxp.data()) {
            *acc = *acc + a * b.conj();
        }
    }
    let c = engine.inverse(&cross)?;

    let norms = x.squared_norm() + xp.squared_norm();
    let two = T::lit(2.0);
    let scale = sigma * sigma * T::from_usize_lossy(x.data().len());
    let data = c
        .data()
        .iter()
        .map(|&cv| {
            let d = (norms - two * cv).max(T::zero());
            (-d / scale).exp()
        })
        .collect();
    RealPlane::new(w, h, data)
}

/// `F(k^{xx})`, the spectrum of the kernel auto-correlation.
pub fn kernel_spectrum<T: Scalar>(
    engine: &FftEngine<T>,
    x: &FeaturePatch<T>,
    sigma: T,
) -> Result<SpectralPlane<T>> {
    let k = gaussian_correlation(engine, x, x, sigma)?;
    engine.forward(&k)
}

/// Per-frame ridge solution `F(y) / (F(k) + λ)`.
pub fn ridge_alpha<T: Scalar>(
    k_spectrum: &SpectralPlane<T>,
    y_spectrum: &SpectralPlane<T>,
    lambda: T,
) -> Result<SpectralPlane<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} must be positive")));
    }
    let denom = k_spectrum.map(|v| v + Complex::new(lambda, T::zero()));
    cdiv(y_spectrum, &denom, T::lit(DIV_GUARD))
}

/// Trains dual coefficients on `x` against the label spectrum.
pub fn train<T: Scalar>(
    engine: &FftEngine<T>,
    x: &FeaturePatch<T>,
    y_spectrum: &SpectralPlane<T>,
    lambda: T,
    sigma: T,
) -> Result<SpectralPlane<T>> {
    let k = kernel_spectrum(engine, x, sigma)?;
    ridge_alpha(&k, y_spectrum, lambda)
}

/// Converts a row-major index into a signed cyclic offset `(dx, dy)`.
/// Indices above half the extent wrap to negative shifts.
pub fn signed_offset(index: usize, width: usize, height: usize) -> (isize, isize) {
    let (row, col) = (index / width, index % width);
    let wrap = |i: usize, n: usize| -> isize {
        if i > n / 2 {
            i as isize - n as isize
        } else {
            i as isize
        }
    };
    (wrap(col, width), wrap(row, height))
}

/// Response over all cyclic shifts of `z`: `F⁻¹(F(k^{z x̂}) ⊙ F(α̂))`.
pub fn detect<T: Scalar>(
    engine: &FftEngine<T>,
    model: &FilterModel<T>,
    z: &FeaturePatch<T>,
) -> Result<Detection<T>> {
    if !z.same_shape(&model.appearance) {
        return Err(Error::Dimension("test patch does not match model appearance".into()));
    }
    let k = gaussian_correlation(engine, z, &model.appearance, model.sigma)?;
    let kf = engine.forward(&k)?;
    let prod = kf.zip_with(&model.alpha_hat, |a, b| a * b)?;
    let response = engine.inverse(&prod)?;
    let (idx, peak_value) = response.argmax();
    Ok(Detection {
        peak_value,
        peak_offset: signed_offset(idx, response.width(), response.height()),
        response,
    })
}

/// Fixed-rate linear interpolation of appearance and dual coefficients.
pub fn kcf_update<T: Scalar>(
    model: &FilterModel<T>,
    new_alpha: &SpectralPlane<T>,
    new_x: &FeaturePatch<T>,
    rate: T,
) -> Result<FilterModel<T>> {
    if !(rate >= T::zero() && rate <= T::one()) {
        return Err(Error::InvalidParameter(format!("learning rate {rate} outside [0, 1]")));
    }
    let keep = T::one() - rate;
    let alpha_hat = model.alpha_hat.zip_with(new_alpha, |old, new| old * keep + new * rate)?;
    let appearance = model.appearance.blend(new_x, rate)?;
    Ok(FilterModel { alpha_hat, appearance, ..model.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::make_label;
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_patch(rng: &mut ChaCha8Rng, w: usize, h: usize, c: usize) -> FeaturePatch<f64> {
        let data = (0..w * h * c).map(|_| rng.gen_range(-1.0..1.0)).collect();
        FeaturePatch::new(w, h, c, data).unwrap()
    }

    #[test]
    fn zero_patches_correlate_to_ones() {
        let e = FftEngine::new(4, 4);
        let z = FeaturePatch::<f64>::zeros(4, 4, 2);
        let k = gaussian_correlation(&e, &z, &z, 0.5).unwrap();
        assert!(k.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn self_correlation_peaks_at_zero_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = FftEngine::new(5, 4);
        let x = random_patch(&mut rng, 5, 4, 3);
        let k = gaussian_correlation(&e, &x, &x, 0.5).unwrap();
        assert!((k.get(0, 0) - 1.0).abs() < 1e-12);
        assert!(k.data().iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn correlation_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = FftEngine::new(4, 3);
        for _ in 0..5 {
            let x = random_patch(&mut rng, 4, 3, 2);
            let xp = random_patch(&mut rng, 4, 3, 2);
            let fast = gaussian_correlation(&e, &x, &xp, 0.7).unwrap();
            let slow = oracle::naive_kernel_correlation(&x, &xp, 0.7).unwrap();
            for (a, b) in fast.data().iter().zip(slow.data()) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn kernel_hits_one_only_at_matching_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let e = FftEngine::new(4, 4);
        let xp = random_patch(&mut rng, 4, 4, 1);
        let x = xp.cyclic_shift(1, 3);
        let k = gaussian_correlation(&e, &x, &xp, 0.5).unwrap();
        let (idx, peak) = k.argmax();
        assert_eq!(signed_offset(idx, 4, 4), (1, -1));
        assert!((peak - 1.0).abs() < 1e-12);
        let second = k
            .data()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        assert!(second < 1.0 - 1e-6);
    }

    #[test]
    fn mismatched_operands_are_rejected() {
        let e = FftEngine::new(4, 4);
        let a = FeaturePatch::<f64>::zeros(4, 4, 1);
        let b = FeaturePatch::<f64>::zeros(4, 4, 2);
        assert!(gaussian_correlation(&e, &a, &b, 0.5).is_err());
        assert!(gaussian_correlation(&e, &a, &a, 0.0).is_err());
    }

    #[test]
    fn zero_label_gives_zero_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = FftEngine::new(4, 4);
        let x = random_patch(&mut rng, 4, 4, 1);
        let alpha = train(&e, &x, &SpectralPlane::zeros(4, 4), 1e-4, 0.5).unwrap();
        assert!(alpha.data().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn zero_features_closed_form() {
        let e = FftEngine::new(4, 4);
        let x = FeaturePatch::<f64>::zeros(4, 4, 1);
        let y = make_label::<f64>(4, 4, 1.0).unwrap();
        let yf = e.forward(&y).unwrap();
        let lambda = 1e-2;
        let alpha = train(&e, &x, &yf, lambda, 0.5).unwrap();
        for (i, (a, yv)) in alpha.data().iter().zip(yf.data()).enumerate() {
            let want = if i == 0 { yv / (16.0 + lambda) } else { yv / lambda };
            assert!((a - want).norm() < 1e-9 * want.norm().max(1.0));
        }
    }

    #[test]
    fn one_dimensional_train_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = FftEngine::new(4, 1);
        let x = random_patch(&mut rng, 4, 1, 1);
        let y = RealPlane::new(4, 1, vec![1.0, 0.3, 0.05, 0.3]).unwrap();
        let alpha = e.inverse(&train(&e, &x, &e.forward(&y).unwrap(), 1e-3, 0.5).unwrap()).unwrap();
        let base = oracle::naive_kernel_correlation(&x, &x, 0.5).unwrap();
        let dense = oracle::dense_ridge_solve(base.data(), y.data(), 1e-3).unwrap();
        for (a, b) in alpha.data().iter().zip(&dense) {
            assert!((a - b).abs() < 1e-8 * b.abs().max(1.0));
        }
    }

    fn trained_model(rng: &mut ChaCha8Rng, w: usize, h: usize) -> (FftEngine<f64>, FilterModel<f64>) {
        let e = FftEngine::new(w, h);
        let x = random_patch(rng, w, h, 2);
        let yf = e.forward(&make_label(w, h, 0.8).unwrap()).unwrap();
        let m = FilterModel::train_new(&e, &x, yf, 1e-4, 0.5).unwrap();
        (e, m)
    }

    #[test]
    fn zero_filter_detects_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (e, mut m) = trained_model(&mut rng, 6, 6);
        m.alpha_hat = SpectralPlane::zeros(6, 6);
        let d = detect(&e, &m, &m.appearance.clone()).unwrap();
        assert!(d.response.data().iter().all(|&v| v == 0.0));
        assert_eq!(d.peak_offset, (0, 0));
        assert_eq!(d.peak_value, 0.0);
    }

    #[test]
    fn self_detection_has_zero_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (e, m) = trained_model(&mut rng, 8, 6);
        let d = detect(&e, &m, &m.appearance).unwrap();
        assert_eq!(d.peak_offset, (0, 0));
        assert!((d.peak_value - d.response.argmax().1).abs() == 0.0);
    }

    #[test]
    fn shifted_input_moves_the_peak() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (e, m) = trained_model(&mut rng, 8, 8);
        let z = m.appearance.cyclic_shift(2, 1);
        let d = detect(&e, &m, &z).unwrap();
        assert_eq!(d.peak_offset, (2, 1));

        let alpha = e.inverse(&m.alpha_hat).unwrap();
        let slow = oracle::naive_detect_response(alpha.data(), &z, &m.appearance, 0.5).unwrap();
        for (a, b) in d.response.data().iter().zip(slow.data()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn response_shifts_with_joint_input_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (e, m) = trained_model(&mut rng, 4, 4);
        let z = random_patch(&mut rng, 4, 4, 2);
        let base = detect(&e, &m, &z).unwrap().response;
        let shifted = detect(&e, &m, &z.cyclic_shift(1, 2)).unwrap().response;
        for r in 0..4 {
            for c in 0..4 {
                let v = shifted.get((r + 2) % 4, (c + 1) % 4);
                assert!((v - base.get(r, c)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn signed_offset_wraps() {
        assert_eq!(signed_offset(3, 4, 4), (-1, 0));
        assert_eq!(signed_offset(2, 4, 4), (2, 0));
        assert_eq!(signed_offset(4 * 3, 4, 4), (0, -1));
        assert_eq!(signed_offset(0, 1, 1), (0, 0));
    }

    #[test]
    fn update_interpolates() {
        let model = FilterModel {
            alpha_hat: SpectralPlane::filled(1, 1, Complex::new(4.0, 0.0)),
            appearance: FeaturePatch::new(1, 1, 1, vec![4.0]).unwrap(),
            label_spectrum: SpectralPlane::ones(1, 1),
            lambda: 1e-4,
            sigma: 0.5,
        };
        let new_alpha = SpectralPlane::filled(1, 1, Complex::new(8.0, 0.0));
        let new_x = FeaturePatch::new(1, 1, 1, vec![8.0]).unwrap();

        let m = kcf_update(&model, &new_alpha, &new_x, 0.25).unwrap();
        assert_eq!(m.alpha_hat.data()[0], Complex::new(5.0, 0.0));
        assert_eq!(m.appearance.data()[0], 5.0);

        let same = kcf_update(&model, &new_alpha, &new_x, 0.0).unwrap();
        assert_eq!(same.alpha_hat, model.alpha_hat);
        assert_eq!(same.appearance, model.appearance);

        let replaced = kcf_update(&model, &new_alpha, &new_x, 1.0).unwrap();
        assert_eq!(replaced.alpha_hat, new_alpha);
        assert_eq!(replaced.appearance, new_x);

        assert!(kcf_update(&model, &new_alpha, &new_x, 1.5).is_err());
        assert!(kcf_update(&model, &new_alpha, &new_x, -0.1).is_err());
    }
}
