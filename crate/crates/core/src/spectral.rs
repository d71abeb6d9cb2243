//! Two-dimensional DFT and elementwise complex arithmetic.
//!
//! Convention: the forward transform is unnormalized and the inverse carries
//! the `1/(W·H)` factor, so `ifft2(fft2(p)) == p`. Any size is supported; the
//! row and column transforms are delegated to `rustfft`, which falls back to
//! Bluestein/Rader for awkward lengths.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Real-valued plane, row-major.
#[derive(Clone, PartialEq)]
pub struct RealPlane<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> RealPlane<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!("empty plane {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(Error::Dimension(format!(
                "plane {width}x{height} needs {} values, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, T::zero())
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        assert!(width > 0 && height > 0, "empty plane");
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(width > 0 && height > 0, "empty plane");
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self { width, height, data }
    }

    /// Builds a plane from nested rows; fails on empty or ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if height == 0 || width == 0 {
            return Err(Error::Dimension("empty plane".into()));
        }
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self { width, height, data: rows.concat() })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.width + col] = value;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Row-major index and value of the maximum; ties go to the smallest index.
    pub fn argmax(&self) -> (usize, T) {
        let mut best = 0;
        let mut best_val = self.data[0];
        for (i, &v) in self.data.iter().enumerate().skip(1) {
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        (best, best_val)
    }
}

impl<T: fmt::Debug> fmt::Debug for RealPlane<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealPlane")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("data", &self.data)
            .finish()
    }
}

/// Complex-valued plane holding a 2-D spectrum, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPlane<T> {
    width: usize,
    height: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> SpectralPlane<T> {
    pub fn new(width: usize, height: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::Dimension(format!(
                "spectral plane {width}x{height} with {} values",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: Complex<T>) -> Self {
        assert!(width > 0 && height > 0, "empty plane");
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, Complex::zero())
    }

    pub fn ones(width: usize, height: usize) -> Self {
        Self::filled(width, height, Complex::one())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.width + col]
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Elementwise map producing a new plane of the same shape.
    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise combination of two equally shaped planes.
    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self> {
        check_shape(self, other)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        check_shape(self, other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }
}

fn check_shape<T: Scalar>(a: &SpectralPlane<T>, b: &SpectralPlane<T>) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::Dimension(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    Ok(())
}

/// Planned row/column transforms for one plane size. Cheap to clone and
/// shareable across threads.
#[derive(Clone)]
pub struct FftEngine<T: Scalar> {
    width: usize,
    height: usize,
    row_fwd: Arc<dyn Fft<T>>,
    row_inv: Arc<dyn Fft<T>>,
    col_fwd: Arc<dyn Fft<T>>,
    col_inv: Arc<dyn Fft<T>>,
}

impl<T: Scalar> fmt::Debug for FftEngine<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FftEngine({}x{})", self.width, self.height)
    }
}

impl<T: Scalar> FftEngine<T> {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "empty FFT size");
        let mut planner = FftPlanner::new();
        Self {
            width,
            height,
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn check(&self, width: usize, height: usize) -> Result<()> {
        if width != self.width || height != self.height {
            return Err(Error::Dimension(format!(
                "engine planned for {}x{}, got {width}x{height}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    /// Unnormalized forward 2-D DFT of a real plane.
    pub fn forward(&self, plane: &RealPlane<T>) -> Result<SpectralPlane<T>> {
        self.check(plane.width, plane.height)?;
        let data = plane.data.iter().map(|&v| Complex::new(v, T::zero())).collect();
        let mut sp = SpectralPlane { width: self.width, height: self.height, data };
        self.transform(&mut sp.data, &*self.row_fwd, &*self.col_fwd);
        Ok(sp)
    }

    /// Forward transform of one channel stored in a flat slice.
    pub(crate) fn forward_slice(&self, values: &[T]) -> SpectralPlane<T> {
        debug_assert_eq!(values.len(), self.width * self.height);
        let data = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        let mut sp = SpectralPlane { width: self.width, height: self.height, data };
        self.transform(&mut sp.data, &*self.row_fwd, &*self.col_fwd);
        sp
    }

    /// Inverse 2-D DFT with `1/(W·H)` scaling, still complex.
    pub fn inverse_complex(&self, sp: &SpectralPlane<T>) -> Result<SpectralPlane<T>> {
        self.check(sp.width, sp.height)?;
        let mut out = sp.clone();
        self.transform(&mut out.data, &*self.row_inv, &*self.col_inv);
        let scale = T::one() / T::from_usize_lossy(self.width * self.height);
        for v in &mut out.data {
            *v = *v * scale;
        }
        Ok(out)
    }

    /// Inverse 2-D DFT keeping the real part.
    pub fn inverse(&self, sp: &SpectralPlane<T>) -> Result<RealPlane<T>> {
        let full = self.inverse_complex(sp)?;
        Ok(RealPlane {
            width: self.width,
            height: self.height,
            data: full.data.into_iter().map(|c| c.re).collect(),
        })
    }

    fn transform(&self, data: &mut [Complex<T>], row: &dyn Fft<T>, col: &dyn Fft<T>) {
        let (w, h) = (self.width, self.height);
        if w > 1 {
            row.process(data);
        }
        if h > 1 {
            let mut column = vec![Complex::zero(); h];
            for c in 0..w {
                for r in 0..h {
                    column[r] = data[r * w + c];
                }
                col.process(&mut column);
                for r in 0..h {
                    data[r * w + c] = column[r];
                }
            }
        }
    }
}

/// Forward 2-D DFT, planning a fresh engine.
pub fn fft2<T: Scalar>(plane: &RealPlane<T>) -> SpectralPlane<T> {
    FftEngine::new(plane.width, plane.height)
        .forward(plane)
        .expect("engine planned for this plane")
}

/// Inverse 2-D DFT (real part), planning a fresh engine.
pub fn ifft2<T: Scalar>(sp: &SpectralPlane<T>) -> RealPlane<T> {
    FftEngine::new(sp.width, sp.height)
        .inverse(sp)
        .expect("engine planned for this plane")
}

/// Elementwise complex product.
pub fn cmul<T: Scalar>(a: &SpectralPlane<T>, b: &SpectralPlane<T>) -> Result<SpectralPlane<T>> {
    a.zip_with(b, |x, y| x * y)
}

/// Elementwise `a ⊙ conj(b)`.
pub fn cmul_conj<T: Scalar>(
    a: &SpectralPlane<T>,
    b: &SpectralPlane<T>,
) -> Result<SpectralPlane<T>> {
    a.zip_with(b, |x, y| x * y.conj())
}

/// Elementwise complex quotient. `epsilon` only replaces a denominator that
/// is exactly `0+0i`; regularized denominators pass through untouched.
pub fn cdiv<T: Scalar>(
    a: &SpectralPlane<T>,
    b: &SpectralPlane<T>,
    epsilon: T,
) -> Result<SpectralPlane<T>> {
    a.zip_with(b, |x, y| {
        if y.re == T::zero() && y.im == T::zero() {
            x / Complex::new(epsilon, T::zero())
        } else {
            x / y
        }
    })
}
