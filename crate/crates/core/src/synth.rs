//! Deterministic synthetic sequences with exact ground truth.
//!
//! A textured square moves at constant velocity over a background. Frames in
//! the optional occlusion range show only the background. The generator is
//! seeded, so the same [`SceneSpec`] always yields identical frames.

use std::fs;
use std::io::Write as _;
use std::ops::Range;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::GrayImage;
use crate::geometry::{BoundingBox, Point};

#[derive(Clone, Debug, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub target_size: (usize, usize),
    /// Top-left corner of the target in frame 0.
    pub start: (f64, f64),
    /// Pixels per frame.
    pub velocity: (f64, f64),
    pub frames: usize,
    /// 0-based frame indices in which the target is hidden.
    pub occlusion: Option<Range<usize>>,
    /// Contrast of the background texture; 0 gives a flat background.
    pub background_contrast: f64,
    pub seed: u64,
}

impl SceneSpec {
    /// 40×40 target moving 2 px/frame to the right on a flat background.
    pub fn constant_velocity() -> Self {
        Self {
            width: 240,
            height: 160,
            target_size: (40, 40),
            start: (30.0, 60.0),
            velocity: (2.0, 0.0),
            frames: 60,
            occlusion: None,
            background_contrast: 0.0,
            seed: 7,
        }
    }

    /// 2 px/frame to the right over a textured background, no occlusion.
    pub fn clean() -> Self {
        Self {
            width: 240,
            height: 200,
            target_size: (40, 40),
            start: (50.0, 60.0),
            velocity: (2.0, 0.0),
            frames: 60,
            occlusion: None,
            background_contrast: 0.25,
            seed: 11,
        }
    }

    /// [`SceneSpec::clean`] with the target hidden in frames 30..36.
    pub fn occluded() -> Self {
        Self { occlusion: Some(30..36), ..Self::clean() }
    }

    /// Target never moves.
    pub fn static_scene() -> Self {
        Self { velocity: (0.0, 0.0), frames: 50, ..Self::clean() }
    }

    pub fn target_box(&self, frame: usize) -> BoundingBox<f64> {
        let t = frame as f64;
        BoundingBox::new(
            self.start.0 + self.velocity.0 * t,
            self.start.1 + self.velocity.1 * t,
            self.target_size.0 as f64,
            self.target_size.1 as f64,
        )
    }

    pub fn is_occluded(&self, frame: usize) -> bool {
        self.occlusion.as_ref().is_some_and(|r| r.contains(&frame))
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticSequence {
    pub spec: SceneSpec,
    pub frames: Vec<GrayImage<f64>>,
    pub ground_truth: Vec<BoundingBox<f64>>,
}

/// Smooth value noise: bilinear interpolation of a seeded lattice.
fn value_noise(width: usize, height: usize, period: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lw, lh) = (width / period + 2, height / period + 2);
    let lattice: Vec<f64> = (0..lw * lh).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let (gx, gy) = (x / period, y / period);
            let fx = (x % period) as f64 / period as f64;
            let fy = (y % period) as f64 / period as f64;
            let at = |i: usize, j: usize| lattice[j * lw + i];
            let top = at(gx, gy) * (1.0 - fx) + at(gx + 1, gy) * fx;
            let bottom = at(gx, gy + 1) * (1.0 - fx) + at(gx + 1, gy + 1) * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    out
}

/// Target texture at target-local pixel `(u, v)`: a dark frame around
/// blocky bright and mid-gray quadrants, so it has edges at several scales.
fn target_texture(u: usize, v: usize, w: usize, h: usize) -> f64 {
    let border = (w.min(h) / 8).max(1);
    if u < border || v < border || u >= w - border || v >= h - border {
        return 0.1;
    }
    let (qu, qv) = (2 * u / w, 2 * v / h);
    let base = match (qu, qv) {
        (0, 0) => 0.95,
        (1, 0) => 0.55,
        (0, 1) => 0.35,
        _ => 0.8,
    };
    let stripe = if (u / (border * 2) + v / (border * 3)).is_multiple_of(2) { 0.0 } else { -0.15 };
    base + stripe
}

pub fn generate(spec: &SceneSpec) -> Result<SyntheticSequence> {
    let (tw, th) = spec.target_size;
    if spec.width == 0 || spec.height == 0 || spec.frames == 0 || tw < 8 || th < 8 {
        return Err(Error::InvalidParameter(format!("unusable scene {spec:?}")));
    }
    let noise = value_noise(spec.width, spec.height, 12, spec.seed);
    let background: Vec<f64> = noise.iter().map(|n| 0.5 + spec.background_contrast * n).collect();

    let mut frames = Vec::with_capacity(spec.frames);
    let mut ground_truth = Vec::with_capacity(spec.frames);
    for t in 0..spec.frames {
        let gt = spec.target_box(t);
        let (ox, oy) = (gt.x.round() as isize, gt.y.round() as isize);
        let hidden = spec.is_occluded(t);
        let frame = GrayImage::from_fn(spec.width, spec.height, |x, y| {
            let (u, v) = (x as isize - ox, y as isize - oy);
            if !hidden && u >= 0 && v >= 0 && (u as usize) < tw && (v as usize) < th {
                target_texture(u as usize, v as usize, tw, th)
            } else {
                background[y * spec.width + x]
            }
        });
        frames.push(frame);
        ground_truth.push(BoundingBox::new(ox as f64, oy as f64, tw as f64, th as f64));
    }
    Ok(SyntheticSequence { spec: spec.clone(), frames, ground_truth })
}

impl SyntheticSequence {
    pub fn center(&self, frame: usize) -> Point<f64> {
        self.ground_truth[frame].center()
    }

    /// Writes `img/0001.png …` and `groundtruth_rect.txt` (comma-separated,
    /// 1-based pixel coordinates) under `dir`.
    pub fn write_otb(&self, dir: &Path) -> Result<()> {
        let img = dir.join("img");
        fs::create_dir_all(&img).map_err(|e| Error::io(&img, e))?;
        for (i, f) in self.frames.iter().enumerate() {
            f.save(&img.join(format!("{:04}.png", i + 1)))?;
        }
        let gt_path = dir.join("groundtruth_rect.txt");
        let mut file = fs::File::create(&gt_path).map_err(|e| Error::io(&gt_path, e))?;
        for b in &self.ground_truth {
            writeln!(file, "{},{},{},{}", b.x + 1.0, b.y + 1.0, b.w, b.h).map_err(|e| Error::io(&gt_path, e))?;
        }
        Ok(())
    }
}
