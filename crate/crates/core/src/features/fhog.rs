//! Felzenszwalb-style HOG with 31 channels per cell: 18 contrast-sensitive
//! orientation bins, 9 contrast-insensitive bins and 4 texture (gradient
//! energy) channels. Cell histograms are built with bilinear spatial voting
//! and normalized against the four 2×2 cell blocks touching each cell, with
//! replicated neighbors at the grid boundary so the output keeps the full
//! `⌊H/cell⌋ × ⌊W/cell⌋` grid.

use super::FeaturePatch;
use crate::error::{Error, Result};
use crate::frame::GrayImage;
use crate::scalar::Scalar;

pub const FHOG_CHANNELS: usize = 31;

const SENSITIVE_BINS: usize = 18;
const INSENSITIVE_BINS: usize = 9;
const CLIP: f64 = 0.2;
const NORM_EPS: f64 = 1e-4;
// 1/sqrt(18)
const TEXTURE_SCALE: f64 = 0.2357;

/// Unit vectors at 20° steps over the half circle.
fn directions<T: Scalar>() -> [(T, T); INSENSITIVE_BINS] {
    let mut out = [(T::zero(), T::zero()); INSENSITIVE_BINS];
    for (o, d) in out.iter_mut().enumerate() {
        let angle = std::f64::consts::PI * o as f64 / INSENSITIVE_BINS as f64;
        *d = (T::lit(angle.cos()), T::lit(angle.sin()));
    }
    out
}

/// Contrast-sensitive orientation bin (0..18) of the gradient `(dx, dy)`:
/// the direction among the 18 half-steps with the largest projection.
pub(crate) fn orientation_bin<T: Scalar>(dirs: &[(T, T); INSENSITIVE_BINS], dx: T, dy: T) -> usize {
    let mut best = T::zero();
    let mut bin = 0;
    for (o, &(u, v)) in dirs.iter().enumerate() {
        let dot = u * dx + v * dy;
        if dot > best {
            best = dot;
            bin = o;
        } else if -dot > best {
            best = -dot;
            bin = o + INSENSITIVE_BINS;
        }
    }
    bin
}

/// Per-cell 18-bin orientation histograms weighted by gradient magnitude.
fn cell_histograms<T: Scalar>(img: &GrayImage<T>, cell: usize, cw: usize, ch: usize) -> Vec<T> {
    let dirs = directions::<T>();
    let mut hist = vec![T::zero(); cw * ch * SENSITIVE_BINS];
    let (vis_w, vis_h) = (cw * cell, ch * cell);
    let cell_t = T::from_usize_lossy(cell);
    let half = T::lit(0.5);

    for y in 0..vis_h {
        for x in 0..vis_w {
            let (xi, yi) = (x as isize, y as isize);
            let dx = img.get_clamped(xi + 1, yi) - img.get_clamped(xi - 1, yi);
            let dy = img.get_clamped(xi, yi + 1) - img.get_clamped(xi, yi - 1);
            let mag = (dx * dx + dy * dy).sqrt();
            if mag == T::zero() {
                continue;
            }
            let bin = orientation_bin(&dirs, dx, dy);

            let xp = (T::from_usize_lossy(x) + half) / cell_t - half;
            let yp = (T::from_usize_lossy(y) + half) / cell_t - half;
            let ixp = xp.floor();
            let iyp = yp.floor();
            let vx0 = xp - ixp;
            let vy0 = yp - iyp;
            let vx1 = T::one() - vx0;
            let vy1 = T::one() - vy0;
            let ixp = ixp.to_isize().unwrap_or(-1);
            let iyp = iyp.to_isize().unwrap_or(-1);

            let mut vote = |cx: isize, cy: isize, weight: T| {
                if cx >= 0 && cy >= 0 && (cx as usize) < cw && (cy as usize) < ch {
                    let idx = ((cy as usize) * cw + cx as usize) * SENSITIVE_BINS + bin;
                    hist[idx] = hist[idx] + weight * mag;
                }
            };
            vote(ixp, iyp, vx1 * vy1);
            vote(ixp + 1, iyp, vx0 * vy1);
            vote(ixp, iyp + 1, vx1 * vy0);
            vote(ixp + 1, iyp + 1, vx0 * vy0);
        }
    }
    hist
}

/// Computes the 31-channel FHOG descriptor of `img`.
pub fn fhog<T: Scalar>(img: &GrayImage<T>, cell_size: usize) -> Result<FeaturePatch<T>> {
    if cell_size == 0 {
        return Err(Error::InvalidParameter("cell_size must be positive".into()));
    }
    if img.width() < cell_size || img.height() < cell_size {
        return Err(Error::Dimension(format!(
            "image {}x{} smaller than one {cell_size}px cell",
            img.width(),
            img.height()
        )));
    }
    let cw = img.width() / cell_size;
    let ch = img.height() / cell_size;
    let hist = cell_histograms(img, cell_size, cw, ch);

    // Gradient energy of each cell over contrast-insensitive orientations.
    let energy: Vec<T> = hist
        .chunks(SENSITIVE_BINS)
        .map(|h| {
            (0..INSENSITIVE_BINS).fold(T::zero(), |acc, o| {
                let v = h[o] + h[o + INSENSITIVE_BINS];
                acc + v * v
            })
        })
        .collect();
    let energy_at = |cx: isize, cy: isize| -> T {
        let cx = cx.clamp(0, cw as isize - 1) as usize;
        let cy = cy.clamp(0, ch as isize - 1) as usize;
        energy[cy * cw + cx]
    };

    let clip = T::lit(CLIP);
    let eps = T::lit(NORM_EPS);
    let half = T::lit(0.5);
    let tex = T::lit(TEXTURE_SCALE);
    let plane = cw * ch;
    let mut out = vec![T::zero(); plane * FHOG_CHANNELS];

    for cy in 0..ch {
        for cx in 0..cw {
            let (x, y) = (cx as isize, cy as isize);
            let block = |bx: isize, by: isize| -> T {
                let s = energy_at(bx, by)
                    + energy_at(bx + 1, by)
                    + energy_at(bx, by + 1)
                    + energy_at(bx + 1, by + 1);
                T::one() / (s + eps).sqrt()
            };
            let norms = [block(x, y), block(x, y - 1), block(x - 1, y), block(x - 1, y - 1)];
            let h = &hist[(cy * cw + cx) * SENSITIVE_BINS..(cy * cw + cx + 1) * SENSITIVE_BINS];
            let at = cy * cw + cx;
            let mut texture = [T::zero(); 4];

            for (o, &v) in h.iter().enumerate() {
                let mut sum = T::zero();
                for (k, &n) in norms.iter().enumerate() {
                    let c = (v * n).min(clip);
                    sum = sum + c;
                    texture[k] = texture[k] + c;
                }
                out[o * plane + at] = half * sum;
            }
            for o in 0..INSENSITIVE_BINS {
                let v = h[o] + h[o + INSENSITIVE_BINS];
                let sum = norms.iter().fold(T::zero(), |acc, &n| acc + (v * n).min(clip));
                out[(SENSITIVE_BINS + o) * plane + at] = half * sum;
            }
            for (k, &t) in texture.iter().enumerate() {
                out[(SENSITIVE_BINS + INSENSITIVE_BINS + k) * plane + at] = tex * t;
            }
        }
    }
    FeaturePatch::new(cw, ch, FHOG_CHANNELS, out)
}
