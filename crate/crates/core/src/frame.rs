//! Grayscale frames: construction, file ingestion and sub-window cropping.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Scalar;

/// Grayscale image with intensities in `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage<T> {
    width: usize,
    height: usize,
    pixels: Vec<T>,
}

impl<T: Scalar> GrayImage<T> {
    /// Values are clamped into `[0, 1]`; NaN is rejected.
    pub fn new(width: usize, height: usize, mut pixels: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!("empty image {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::Dimension(format!(
                "image {width}x{height} needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        for p in &mut pixels {
            if p.is_nan() {
                return Err(Error::InvalidParameter("NaN pixel".into()));
            }
            *p = p.max(T::zero()).min(T::one());
        }
        Ok(Self { width, height, pixels })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(width > 0 && height > 0, "empty image");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y).max(T::zero()).min(T::one()));
            }
        }
        Self { width, height, pixels }
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self::from_fn(width, height, |_, _| value)
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
    pub fn get(&self, x: usize, y: usize) -> T {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    /// Pixel lookup with coordinates clamped to the nearest valid pixel.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> T {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.pixels[cy * self.width + cx]
    }

    /// Loads an 8-bit grayscale or RGB(A) raster file. Color is reduced to
    /// luma with the 0.299/0.587/0.114 weights.
    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::from_dynamic(&img))
    }

    pub fn from_dynamic(img: &image::DynamicImage) -> Self {
        use image::DynamicImage;
        let scale = 1.0 / 255.0;
        match img {
            DynamicImage::ImageLuma8(g) => {
                let (w, h) = g.dimensions();
                let pixels = g.as_raw().iter().map(|&v| T::lit(f64::from(v) * scale)).collect();
                Self { width: w as usize, height: h as usize, pixels }
            }
            other => {
                let rgb = other.to_rgb8();
                let (w, h) = rgb.dimensions();
                let pixels = rgb
                    .pixels()
                    .map(|p| {
                        let [r, g, b] = p.0;
                        let luma = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
                        T::lit((luma * scale).clamp(0.0, 1.0))
                    })
                    .collect();
                Self { width: w as usize, height: h as usize, pixels }
            }
        }
    }

    /// Quantizes to 8 bits and writes a grayscale PNG (or whatever the
    /// extension selects).
    pub fn save(&self, path: &Path) -> Result<()> {
        let raw: Vec<u8> = self
            .pixels
            .iter()
            .map(|p| (p.to_f64_lossy() * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect();
        let buf = image::GrayImage::from_raw(self.width as u32, self.height as u32, raw)
            .expect("buffer sized from image dimensions");
        buf.save(path).map_err(|source| Error::Image { path: path.to_path_buf(), source })
    }
}

/// Top-left pixel index of a `size`-wide window centered on `center`.
#[inline]
pub(crate) fn window_origin<T: Scalar>(center: T, size: usize) -> isize {
    center.floor().to_isize().unwrap_or(0) - (size / 2) as isize
}

/// Crops a `w×h` window centered on `center`; out-of-bounds pixels replicate
/// the nearest border pixel.
pub fn extract_subwindow<T: Scalar>(
    img: &GrayImage<T>,
    center: Point<T>,
    size: (usize, usize),
) -> Result<GrayImage<T>> {
    let (w, h) = size;
    if w == 0 || h == 0 {
        return Err(Error::InvalidParameter(format!("non-positive window {w}x{h}")));
    }
    if !center.x.is_finite() || !center.y.is_finite() {
        return Err(Error::InvalidParameter("non-finite window center".into()));
    }
    let x0 = window_origin(center.x, w);
    let y0 = window_origin(center.y, h);
    let mut pixels = Vec::with_capacity(w * h);
    for dy in 0..h as isize {
        for dx in 0..w as isize {
            pixels.push(img.get_clamped(x0 + dx, y0 + dy));
        }
    }
    Ok(GrayImage { width: w, height: h, pixels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> GrayImage<f64> {
        GrayImage::from_fn(w, h, |x, y| (y * w + x) as f64 / (w * h) as f64)
    }

    #[test]
    fn interior_crop_is_exact_copy() {
        let img = ramp(10, 10);
        let crop = extract_subwindow(&img, Point::new(5.0, 4.0), (3, 3)).unwrap();
        for dy in 0..3 {
            for dx in 0..3 {
                assert_eq!(crop.get(dx, dy), img.get(4 + dx, 3 + dy));
            }
        }
        // cropping the crop's full extent reproduces it
        let again = extract_subwindow(&crop, Point::new(1.0, 1.0), (3, 3)).unwrap();
        assert_eq!(again, crop);
    }

    #[test]
    fn corner_crop_replicates_top_left() {
        let img = ramp(10, 10);
        let crop = extract_subwindow(&img, Point::new(0.0, 0.0), (3, 3)).unwrap();
        assert_eq!(crop.get(0, 0), img.get(0, 0));
        assert_eq!(crop.get(1, 0), img.get(0, 0));
        assert_eq!(crop.get(0, 1), img.get(0, 0));
        assert_eq!(crop.get(2, 2), img.get(1, 1));
    }

    #[test]
    fn bottom_right_crop_matches_clamped_indexing() {
        let img = GrayImage::new(3, 3, (0..9).map(|v| v as f64 / 10.0).collect()).unwrap();
        let crop = extract_subwindow(&img, Point::new(2.0, 2.0), (3, 3)).unwrap();
        for dy in 0..3usize {
            for dx in 0..3usize {
                let sx = (1 + dx).min(2);
                let sy = (1 + dy).min(2);
                assert_eq!(crop.get(dx, dy), img.get(sx, sy));
            }
        }
    }

    #[test]
    fn far_outside_center_is_all_border() {
        let img = ramp(4, 4);
        let crop = extract_subwindow(&img, Point::new(-50.0, 100.0), (2, 2)).unwrap();
        assert!(crop.pixels().iter().all(|&p| p == img.get(0, 3)));
    }

    #[test]
    fn zero_size_is_an_error() {
        let img = ramp(4, 4);
        assert!(extract_subwindow(&img, Point::new(1.0, 1.0), (0, 2)).is_err());
    }

    #[test]
    fn rgb_uses_rec601_luma() {
        let rgb = image::RgbImage::from_pixel(1, 1, image::Rgb([255, 0, 0]));
        let g = GrayImage::<f64>::from_dynamic(&image::DynamicImage::ImageRgb8(rgb));
        assert!((g.get(0, 0) - 0.299).abs() < 1e-12);
    }

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.png");
        let img = GrayImage::<f64>::from_fn(5, 3, |x, y| ((x + 2 * y) * 17) as f64 / 255.0);
        img.save(&path).unwrap();
        let back = GrayImage::<f64>::load(&path).unwrap();
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
