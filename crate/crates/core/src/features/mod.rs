//! Windowed feature representation of an image patch.

mod fhog;

pub use fhog::{fhog, FHOG_CHANNELS};

use crate::error::{Error, Result};
use crate::frame::{extract_subwindow, GrayImage};
use crate::geometry::Point;
use crate::scalar::Scalar;
use crate::spectral::RealPlane;

/// Multi-channel feature grid; channels are stored as consecutive row-major planes.
#[derive(Clone, Debug, PartialEq)]
pub struct FeaturePatch<T> {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Scalar> FeaturePatch<T> {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 || channels == 0 {
            return Err(Error::Dimension(format!("empty patch {width}x{height}x{channels}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::Dimension(format!(
                "patch {width}x{height}x{channels} needs {} values, got {}",
                width * height * channels,
                data.len()
            )));
        }
        Ok(Self { width, height, channels, data })
    }

    pub fn zeros(width: usize, height: usize, channels: usize) -> Self {
        assert!(width > 0 && height > 0 && channels > 0, "empty patch");
        Self { width, height, channels, data: vec![T::zero(); width * height * channels] }
    }

    pub fn from_plane(plane: RealPlane<T>) -> Self {
        let (width, height) = (plane.width(), plane.height());
        Self { width, height, channels: 1, data: plane.into_data() }
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
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn plane_len(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> &[T] {
        let n = self.plane_len();
        &self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn get(&self, channel: usize, row: usize, col: usize) -> T {
        self.data[channel * self.plane_len() + row * self.width + col]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    pub fn squared_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc + v * v)
    }

    /// Multiplies every channel by `window` (same cell grid).
    pub fn apply_window(&mut self, window: &RealPlane<T>) -> Result<()> {
        if window.width() != self.width || window.height() != self.height {
            return Err(Error::Dimension("window does not match patch grid".into()));
        }
        let n = self.plane_len();
        for chunk in self.data.chunks_mut(n) {
            for (v, &w) in chunk.iter_mut().zip(window.data()) {
                *v = *v * w;
            }
        }
        Ok(())
    }

    /// `(1-rate)·self + rate·other`, elementwise.
    pub fn blend(&self, other: &Self, rate: T) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::Dimension("patch shapes differ".into()));
        }
        let keep = T::one() - rate;
        Ok(Self {
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| keep * a + rate * b).collect(),
            ..*self
        })
    }

    /// Cyclic shift: `out[c][r][k] = self[c][r - dy][k - dx]` (indices modulo size).
    pub fn cyclic_shift(&self, dx: isize, dy: isize) -> Self {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.channels {
            for r in 0..h {
                for k in 0..w {
                    let sr = (r - dy).rem_euclid(h) as usize;
                    let sk = (k - dx).rem_euclid(w) as usize;
                    data.push(self.get(c, sr, sk));
                }
            }
        }
        Self { data, ..*self }
    }
}

/// Outer product of 1-D Hann windows `0.5·(1 − cos(2πi/(N−1)))`; a length of
/// one degenerates to `[1]`.
pub fn hann2d<T: Scalar>(w: usize, h: usize) -> RealPlane<T> {
    let hx = hann1d::<T>(w);
    let hy = hann1d::<T>(h);
    RealPlane::from_fn(w, h, |r, c| hy[r] * hx[c])
}

pub fn hann1d<T: Scalar>(n: usize) -> Vec<T> {
    assert!(n >= 1, "hann window length must be positive");
    if n == 1 {
        return vec![T::one()];
    }
    let half = T::lit(0.5);
    let denom = T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| half * (T::one() - (T::TAU() * T::from_usize_lossy(i) / denom).cos()))
        .collect()
}

/// Gaussian regression target peaked at bin `(0, 0)` with circular wrap-around.
pub fn make_label<T: Scalar>(w: usize, h: usize, bandwidth: T) -> Result<RealPlane<T>> {
    if w == 0 || h == 0 {
        return Err(Error::Dimension("empty label".into()));
    }
    if !(bandwidth > T::zero()) {
        return Err(Error::InvalidParameter(format!("label bandwidth {bandwidth}")));
    }
    let wrap = |i: usize, n: usize| -> T {
        let i = if i > n / 2 { i as f64 - n as f64 } else { i as f64 };
        T::lit(i)
    };
    let denom = T::lit(2.0) * bandwidth * bandwidth;
    Ok(RealPlane::from_fn(w, h, |r, c| {
        let (dy, dx) = (wrap(r, h), wrap(c, w));
        (-(dx * dx + dy * dy) / denom).exp()
    }))
}

/// Feature family used by the tracker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureMode {
    /// 31-channel Felzenszwalb HOG over square cells.
    Fhog,
    /// Raw intensity, mean-subtracted, one pixel per cell.
    Gray,
}

impl FeatureMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureMode::Fhog => "fhog",
            FeatureMode::Gray => "gray",
        }
    }
}

/// Crops a search window, turns it into features and applies the cosine
/// window. Geometry is fixed at construction.
#[derive(Clone, Debug)]
pub struct FeatureExtractor<T: Scalar> {
    mode: FeatureMode,
    cell_size: usize,
    window_px: (usize, usize),
    grid: (usize, usize),
    cosine: RealPlane<T>,
}

impl<T: Scalar> FeatureExtractor<T> {
    /// `window` is the requested search-window size in pixels. In FHOG mode
    /// it is rounded up to a whole number of cells.
    pub fn new(mode: FeatureMode, cell_size: usize, window: (T, T)) -> Result<Self> {
        let cell_size = match mode {
            FeatureMode::Fhog => cell_size,
            FeatureMode::Gray => 1,
        };
        if cell_size == 0 {
            return Err(Error::InvalidParameter("cell_size must be positive".into()));
        }
        let to_cells = |v: T| -> Result<usize> {
            let cells = (v / T::from_usize_lossy(cell_size)).ceil();
            match cells.to_usize() {
                Some(n) if n >= 1 => Ok(n),
                _ => Err(Error::InvalidParameter(format!("window extent {v}"))),
            }
        };
        let grid = (to_cells(window.0)?, to_cells(window.1)?);
        let window_px = (grid.0 * cell_size, grid.1 * cell_size);
        Ok(Self { mode, cell_size, window_px, grid, cosine: hann2d(grid.0, grid.1) })
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    /// Effective cell size (always 1 in gray mode).
    pub fn cell_size(&self) -> usize {
        self.cell_size
    }

    pub fn window_px(&self) -> (usize, usize) {
        self.window_px
    }

    /// Feature grid `(width, height)` in cells.
    pub fn grid(&self) -> (usize, usize) {
        self.grid
    }

    pub fn channels(&self) -> usize {
        match self.mode {
            FeatureMode::Fhog => FHOG_CHANNELS,
            FeatureMode::Gray => 1,
        }
    }

    pub fn extract(&self, frame: &GrayImage<T>, center: Point<T>) -> Result<FeaturePatch<T>> {
        let window = extract_subwindow(frame, center, self.window_px)?;
        let mut patch = match self.mode {
            FeatureMode::Fhog => fhog(&window, self.cell_size)?,
            FeatureMode::Gray => gray_features(&window),
        };
        patch.apply_window(&self.cosine)?;
        Ok(patch)
    }
}

/// Single-channel mean-subtracted intensity.
pub fn gray_features<T: Scalar>(img: &GrayImage<T>) -> FeaturePatch<T> {
    let n = T::from_usize_lossy(img.pixels().len());
    let mean = img.pixels().iter().fold(T::zero(), |a, &v| a + v) / n;
    let data = img.pixels().iter().map(|&v| v - mean).collect();
    FeaturePatch { width: img.width(), height: img.height(), channels: 1, data }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hann_degenerate_and_small() {
        assert_eq!(hann2d::<f64>(1, 1).data(), &[1.0]);
        let h3 = hann1d::<f64>(3);
        assert!(h3[0].abs() < 1e-15 && (h3[1] - 1.0).abs() < 1e-15 && h3[2].abs() < 1e-15);
        let h4 = hann1d::<f64>(4);
        let want = [0.0, 0.75, 0.75, 0.0];
        for (a, b) in h4.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn hann_is_bounded_and_symmetric() {
        let p = hann2d::<f64>(7, 10);
        for r in 0..10 {
            for c in 0..7 {
                let v = p.get(r, c);
                assert!((0.0..=1.0).contains(&v));
                assert!((v - p.get(9 - r, c)).abs() < 1e-15);
                assert!((v - p.get(r, 6 - c)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn label_peak_and_offset() {
        assert_eq!(make_label::<f64>(1, 1, 0.3).unwrap().data(), &[1.0]);
        let y = make_label::<f64>(8, 8, 1.0).unwrap();
        assert_eq!(y.get(0, 0), 1.0);
        assert!((y.get(0, 1) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((y.get(1, 0) - (-0.5f64).exp()).abs() < 1e-15);
        assert!(y.data().iter().all(|&v| v > 0.0 && v <= 1.0));
        assert!(make_label::<f64>(4, 4, 0.0).is_err());
    }

    #[test]
    fn label_is_wrap_symmetric() {
        for (w, h) in [(8, 8), (7, 5), (6, 9)] {
            let y = make_label::<f64>(w, h, 1.3).unwrap();
            for r in 0..h {
                for c in 0..w {
                    let (mr, mc) = ((h - r) % h, (w - c) % w);
                    assert!((y.get(r, c) - y.get(mr, mc)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn window_attenuates_border_cells() {
        let mut p = FeaturePatch::<f64>::new(5, 5, 2, vec![1.0; 50]).unwrap();
        p.apply_window(&hann2d(5, 5)).unwrap();
        for c in 0..2 {
            assert_eq!(p.get(c, 0, 3), 0.0);
            assert_eq!(p.get(c, 4, 4), 0.0);
            assert_eq!(p.get(c, 2, 2), 1.0);
        }
    }

    #[test]
    fn extractor_grid_rounds_up_to_cells() {
        let ex = FeatureExtractor::<f64>::new(FeatureMode::Fhog, 4, (150.0, 150.0)).unwrap();
        assert_eq!(ex.grid(), (38, 38));
        assert_eq!(ex.window_px(), (152, 152));
        let gray = FeatureExtractor::<f64>::new(FeatureMode::Gray, 4, (15.0, 9.0)).unwrap();
        assert_eq!(gray.grid(), (15, 9));
        assert_eq!(gray.cell_size(), 1);
    }

    #[test]
    fn gray_features_are_zero_mean() {
        let img = GrayImage::<f64>::from_fn(6, 4, |x, y| (x * y) as f64 / 20.0);
        let f = gray_features(&img);
        let sum: f64 = f.data().iter().sum();
        assert!(sum.abs() < 1e-12);
    }

    #[test]
    fn cyclic_shift_moves_content() {
        let p = FeaturePatch::<f64>::new(4, 3, 1, (0..12).map(f64::from).collect()).unwrap();
        let s = p.cyclic_shift(1, 2);
        assert_eq!(s.get(0, 2, 1), p.get(0, 0, 0));
        assert_eq!(s.cyclic_shift(-1, -2), p);
    }
}
