//! Coarse-to-fine re-acquisition around the last known position.
//!
//! Candidate windows sit on a polar grid of `n_r` rings and `n_t` angles;
//! odd angle indices are rotated by half an angular step so that adjacent
//! rings interleave. Each candidate is scored by its maximal correlation
//! response, and one ordinary detection at the winner refines the position.

use crate::error::{Error, Result};
use crate::features::FeatureExtractor;
use crate::frame::GrayImage;
use crate::geometry::{BoundingBox, Point};
use crate::kcf::{detect, Detection, FilterModel};
use crate::scalar::Scalar;
use crate::spectral::FftEngine;

#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid<T> {
    pub center: Point<T>,
    pub radius: T,
    pub n_r: usize,
    pub n_t: usize,
    /// Ring-major, angle-minor.
    pub points: Vec<Point<T>>,
}

/// Angle of step `i_t` (1-based) on an `n_t`-step circle.
pub fn polar_angle(i_t: usize, n_t: usize) -> f64 {
    let step = std::f64::consts::TAU / n_t as f64;
    let base = i_t as f64 * step;
    if i_t % 2 == 1 {
        base + step / 2.0
    } else {
        base
    }
}

/// Candidate centers `(x₀ + i_r·r_s·cos θ, y₀ + i_r·r_s·sin θ)` for
/// `i_r ∈ 1..=n_r`, `i_t ∈ 1..=n_t`, with `r_s = radius / n_r`.
pub fn polar_candidates<T: Scalar>(
    center: Point<T>,
    radius: T,
    n_r: usize,
    n_t: usize,
) -> Result<PolarGrid<T>> {
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("redetection radius {radius}")));
    }
    if n_r == 0 || n_t == 0 {
        return Err(Error::InvalidParameter(format!("polar grid {n_r}x{n_t}")));
    }
    let ring_step = radius / T::from_usize_lossy(n_r);
    let mut points = Vec::with_capacity(n_r * n_t);
    for i_r in 1..=n_r {
        let r = T::from_usize_lossy(i_r) * ring_step;
        for i_t in 1..=n_t {
            let theta = T::lit(polar_angle(i_t, n_t));
            points.push(Point::new(center.x + r * theta.cos(), center.y + r * theta.sin()));
        }
    }
    Ok(PolarGrid { center, radius, n_r, n_t, points })
}

#[derive(Clone, Debug)]
pub struct CoarseResult<T> {
    pub best_index: usize,
    pub best_center: Point<T>,
    pub best_response: T,
    /// Peak response of every candidate, in grid order.
    pub responses: Vec<T>,
}

/// Scores every candidate window by its detection peak and returns the
/// best one; ties go to the lowest candidate index.
pub fn coarse_search<T: Scalar>(
    engine: &FftEngine<T>,
    extractor: &FeatureExtractor<T>,
    model: &FilterModel<T>,
    frame: &GrayImage<T>,
    grid: &PolarGrid<T>,
) -> Result<CoarseResult<T>> {
    if grid.points.is_empty() {
        return Err(Error::Empty("polar grid"));
    }
    let responses = grid
        .points
        .iter()
        .map(|&p| {
            let z = extractor.extract(frame, p)?;
            Ok(detect(engine, model, &z)?.peak_value)
        })
        .collect::<Result<Vec<T>>>()?;
    let mut best_index = 0;
    for (i, &r) in responses.iter().enumerate().skip(1) {
        if r > responses[best_index] {
            best_index = i;
        }
    }
    Ok(CoarseResult {
        best_index,
        best_center: grid.points[best_index],
        best_response: responses[best_index],
        responses,
    })
}

/// One detection pass at `coarse_center`; the peak offset (cells → pixels)
/// moves a box of `target_size` centered there.
pub fn fine_localize<T: Scalar>(
    engine: &FftEngine<T>,
    extractor: &FeatureExtractor<T>,
    model: &FilterModel<T>,
    frame: &GrayImage<T>,
    coarse_center: Point<T>,
    target_size: (T, T),
) -> Result<(BoundingBox<T>, Detection<T>)> {
    let z = extractor.extract(frame, coarse_center)?;
    let det = detect(engine, model, &z)?;
    let cell = T::from_usize_lossy(extractor.cell_size());
    let (dx, dy) = det.peak_offset;
    let center = Point::new(
        coarse_center.x + T::lit(dx as f64) * cell,
        coarse_center.y + T::lit(dy as f64) * cell,
    );
    Ok((BoundingBox::from_center(center, target_size.0, target_size.1), det))
}
