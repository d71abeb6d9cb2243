//! Per-frame tracking loop.
//!
//! Every frame: detect in the search window around the previous box. During
//! warmup the detection is always accepted. Afterwards, in `oct-kcf` mode, a
//! peak whose z-score against the running response model reaches `t_g`
//! rejects the sample; the target is then re-acquired on a polar grid around
//! the previous position and the model is trained on the relocated window.
//! The response statistics absorb the final peak of every frame.

use crate::config::{TrackerConfig, TrackerMode};
use crate::error::{Error, Result};
use crate::features::{make_label, FeatureExtractor, FeaturePatch};
use crate::frame::GrayImage;
use crate::geometry::{BoundingBox, Point};
use crate::kcf::{detect, kcf_update, kernel_spectrum, ridge_alpha, FilterModel};
use crate::oct::{compute_eta, is_drifting, oct_update, stats_update, ResponseStats, RhoSchedule};
use crate::redetect::{coarse_search, fine_localize, polar_candidates};
use crate::scalar::Scalar;
use crate::spectral::FftEngine;

/// Fraction of `sqrt(w·h)` used as the label bandwidth (before cell scaling).
const LABEL_BANDWIDTH_FACTOR: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateDecision {
    /// Statistics still accumulating; sample accepted unconditionally.
    Warmup,
    Accepted,
    /// Peak fell outside the Gaussian band; redetection ran.
    Drift,
    /// Plain KCF mode has no gate.
    Disabled,
}

impl GateDecision {
    pub fn as_str(&self) -> &'static str {
        match self {
            GateDecision::Warmup => "warmup",
            GateDecision::Accepted => "accept",
            GateDecision::Drift => "drift",
            GateDecision::Disabled => "off",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics<T> {
    pub frame_index: usize,
    /// Peak of the regular detection at the previous position.
    pub peak: T,
    /// z-score of `peak` against the statistics before this frame.
    pub z_score: Option<T>,
    pub gate: GateDecision,
    pub redetected: bool,
    /// Peak absorbed into the statistics (the refined peak after redetection).
    pub absorbed_peak: T,
}

#[derive(Clone, Debug)]
pub struct TrackerState<T: Scalar> {
    pub model: FilterModel<T>,
    pub stats: ResponseStats<T>,
    pub current_box: BoundingBox<T>,
    /// 1-based index of the last processed frame.
    pub frame_index: usize,
    pub last_redetect_frame: Option<usize>,
}

/// Single-target tracker. One instance per sequence; instances are `Send`.
#[derive(Clone, Debug)]
pub struct Tracker<T: Scalar> {
    cfg: TrackerConfig,
    engine: FftEngine<T>,
    extractor: FeatureExtractor<T>,
    frame_size: (usize, usize),
    target_size: (T, T),
    state: TrackerState<T>,
}

fn clamp_center<T: Scalar>(c: Point<T>, frame: (usize, usize)) -> Point<T> {
    let w = T::from_usize_lossy(frame.0);
    let h = T::from_usize_lossy(frame.1);
    Point::new(c.x.max(T::zero()).min(w), c.y.max(T::zero()).min(h))
}

impl<T: Scalar> Tracker<T> {
    /// Trains the initial model on the window around `bbox`.
    pub fn init(frame: &GrayImage<T>, bbox: BoundingBox<T>, cfg: TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        bbox.validate()?;
        let (fw, fh) = (T::from_usize_lossy(frame.width()), T::from_usize_lossy(frame.height()));
        if bbox.x >= fw || bbox.y >= fh || bbox.x + bbox.w <= T::zero() || bbox.y + bbox.h <= T::zero() {
            return Err(Error::DegenerateBox(format!(
                "box {bbox:?} does not overlap the {}x{} frame",
                frame.width(),
                frame.height()
            )));
        }
        let frame_size = (frame.width(), frame.height());
        let center = clamp_center(bbox.center(), frame_size);
        let current_box = BoundingBox::from_center(center, bbox.w, bbox.h);

        let scale = T::lit(cfg.search_scale);
        let extractor =
            FeatureExtractor::new(cfg.feature_mode, cfg.cell_size, (bbox.w * scale, bbox.h * scale))?;
        let (gw, gh) = extractor.grid();
        let engine = FftEngine::new(gw, gh);

        let cell = T::from_usize_lossy(extractor.cell_size());
        let bandwidth = T::lit(LABEL_BANDWIDTH_FACTOR) * (bbox.w * bbox.h).sqrt() / cell;
        let label = make_label(gw, gh, bandwidth)?;
        let label_spectrum = engine.forward(&label)?;

        let x = extractor.extract(frame, center)?;
        let model = FilterModel::train_new(
            &engine,
            &x,
            label_spectrum,
            T::lit(cfg.lambda),
            T::lit(cfg.kernel_sigma),
        )?;
        let stats = ResponseStats::new(cfg.warmup_frames.saturating_sub(1).max(1));

        Ok(Self {
            engine,
            extractor,
            frame_size,
            target_size: (bbox.w, bbox.h),
            state: TrackerState { model, stats, current_box, frame_index: 1, last_redetect_frame: None },
            cfg,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    pub fn state(&self) -> &TrackerState<T> {
        &self.state
    }

    pub fn model(&self) -> &FilterModel<T> {
        &self.state.model
    }

    pub fn current_box(&self) -> BoundingBox<T> {
        self.state.current_box
    }

    pub fn extractor(&self) -> &FeatureExtractor<T> {
        &self.extractor
    }

    pub fn engine(&self) -> &FftEngine<T> {
        &self.engine
    }

    /// Redetection radius in pixels.
    pub fn redetect_radius(&self) -> T {
        self.target_size.0.max(self.target_size.1) * T::lit(self.cfg.redetect_radius_factor)
    }

    /// Processes the next frame and returns the new box.
    pub fn track_frame(&mut self, frame: &GrayImage<T>) -> Result<(BoundingBox<T>, Diagnostics<T>)> {
        if (frame.width(), frame.height()) != self.frame_size {
            return Err(Error::Dimension(format!(
                "frame {}x{} in a {}x{} sequence",
                frame.width(),
                frame.height(),
                self.frame_size.0,
                self.frame_size.1
            )));
        }
        let t = self.state.frame_index + 1;
        let prev_center = self.state.current_box.center();
        let cell = T::from_usize_lossy(self.extractor.cell_size());

        let z = self.extractor.extract(frame, prev_center)?;
        let det = detect(&self.engine, &self.state.model, &z)?;
        let peak = det.peak_value;
        let stats = self.state.stats;
        let z_score = (stats.count > 0).then(|| stats.z_score(peak));

        let in_warmup = t <= self.cfg.warmup_frames;
        let gate = match self.cfg.mode {
            TrackerMode::Kcf => GateDecision::Disabled,
            TrackerMode::OctKcf if in_warmup => GateDecision::Warmup,
            TrackerMode::OctKcf if is_drifting(&stats, peak, T::lit(self.cfg.t_g)) => GateDecision::Drift,
            TrackerMode::OctKcf => GateDecision::Accepted,
        };

        let (new_box, absorbed) = if gate == GateDecision::Drift {
            let grid = polar_candidates(prev_center, self.redetect_radius(), self.cfg.n_r, self.cfg.n_t)?;
            let coarse = coarse_search(&self.engine, &self.extractor, &self.state.model, frame, &grid)?;
            let (b, fine) = fine_localize(
                &self.engine,
                &self.extractor,
                &self.state.model,
                frame,
                coarse.best_center,
                self.target_size,
            )?;
            self.state.last_redetect_frame = Some(t);
            (b, fine.peak_value)
        } else {
            let (dx, dy) = det.peak_offset;
            let moved = Point::new(
                prev_center.x + T::lit(dx as f64) * cell,
                prev_center.y + T::lit(dy as f64) * cell,
            );
            (BoundingBox::from_center(moved, self.target_size.0, self.target_size.1), peak)
        };
        let center = clamp_center(new_box.center(), self.frame_size);
        let new_box = BoundingBox::from_center(center, self.target_size.0, self.target_size.1);

        let x = self.extractor.extract(frame, center)?;
        self.state.model = self.updated_model(&x, t)?;
        self.state.stats = stats_update(&stats, absorbed)?;
        self.state.current_box = new_box;
        self.state.frame_index = t;

        let diagnostics = Diagnostics {
            frame_index: t,
            peak,
            z_score,
            gate,
            redetected: gate == GateDecision::Drift,
            absorbed_peak: absorbed,
        };
        Ok((new_box, diagnostics))
    }

    fn updated_model(&self, x: &FeaturePatch<T>, t: usize) -> Result<FilterModel<T>> {
        let model = &self.state.model;
        let k = kernel_spectrum(&self.engine, x, model.sigma)?;
        let new_alpha = ridge_alpha(&k, &model.label_spectrum, model.lambda)?;
        match self.cfg.mode {
            TrackerMode::Kcf => kcf_update(model, &new_alpha, x, T::lit(self.cfg.kcf_rate)),
            TrackerMode::OctKcf => {
                let eta = compute_eta(&k, model.lambda, T::lit(self.cfg.s))?;
                let alpha_hat = oct_update(&model.alpha_hat, &new_alpha, &eta)?;
                let rho: T = RhoSchedule::InverseFrame.rate(t);
                let appearance = model.appearance.blend(x, rho)?;
                Ok(FilterModel { alpha_hat, appearance, ..model.clone() })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureMode;

    fn square_frame(w: usize, h: usize, cx: f64, cy: f64, side: f64) -> GrayImage<f64> {
        GrayImage::from_fn(w, h, |x, y| {
            let (fx, fy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
            if fx.abs() < side / 2.0 && fy.abs() < side / 2.0 {
                0.3 + 0.5 * (((x / 3) + (y / 3)) % 2) as f64
            } else {
                0.1 + 0.02 * ((x * 7 + y * 13) % 5) as f64
            }
        })
    }

    #[test]
    fn init_geometry_for_hundred_pixel_target() {
        let frame = square_frame(300, 300, 150.0, 150.0, 100.0);
        let t = Tracker::init(&frame, BoundingBox::new(100.0, 100.0, 100.0, 100.0), TrackerConfig::default())
            .unwrap();
        assert_eq!(t.extractor().grid(), (38, 38));
        assert_eq!(t.model().alpha_hat.width(), 38);
        assert_eq!(t.model().alpha_hat.height(), 38);
        assert_eq!(t.state().frame_index, 1);
        assert_eq!(t.state().stats.count, 0);
    }

    #[test]
    fn self_detection_on_init_frame() {
        let frame = square_frame(120, 100, 60.0, 50.0, 24.0);
        let t = Tracker::init(&frame, BoundingBox::new(48.0, 38.0, 24.0, 24.0), TrackerConfig::default())
            .unwrap();
        let z = t.extractor().extract(&frame, t.current_box().center()).unwrap();
        let d = detect(t.engine(), t.model(), &z).unwrap();
        assert_eq!(d.peak_offset, (0, 0));
    }

    #[test]
    fn init_box_partially_outside_frame() {
        let frame = square_frame(80, 80, 5.0, 5.0, 20.0);
        let mut t =
            Tracker::init(&frame, BoundingBox::new(-5.0, -5.0, 20.0, 20.0), TrackerConfig::default()).unwrap();
        let (b, _) = t.track_frame(&frame).unwrap();
        assert!(b.center().x >= 0.0 && b.center().y >= 0.0);
    }

    #[test]
    fn degenerate_boxes_are_rejected() {
        let frame = square_frame(50, 50, 25.0, 25.0, 10.0);
        let cfg = TrackerConfig::default();
        assert!(Tracker::init(&frame, BoundingBox::new(10.0, 10.0, 0.0, 5.0), cfg.clone()).is_err());
        assert!(Tracker::init(&frame, BoundingBox::new(100.0, 10.0, 5.0, 5.0), cfg.clone()).is_err());
        assert!(Tracker::init(&frame, BoundingBox::new(-20.0, 10.0, 5.0, 5.0), cfg).is_err());
    }

    #[test]
    fn frame_size_mismatch_is_rejected() {
        let frame = square_frame(60, 60, 30.0, 30.0, 16.0);
        let mut t =
            Tracker::init(&frame, BoundingBox::new(22.0, 22.0, 16.0, 16.0), TrackerConfig::default()).unwrap();
        let other = square_frame(61, 60, 30.0, 30.0, 16.0);
        assert!(t.track_frame(&other).is_err());
        assert_eq!(t.state().frame_index, 1);
    }

    #[test]
    fn static_scene_is_stable() {
        for mode in [TrackerMode::Kcf, TrackerMode::OctKcf] {
            let frame = square_frame(100, 100, 50.0, 50.0, 20.0);
            let init = BoundingBox::new(40.0, 40.0, 20.0, 20.0);
            let mut t = Tracker::init(&frame, init, TrackerConfig::with_mode(mode)).unwrap();
            for _ in 0..20 {
                let (b, d) = t.track_frame(&frame).unwrap();
                assert_eq!(b, init);
                assert!(!d.redetected);
            }
        }
    }

    #[test]
    fn gate_is_quiet_during_warmup() {
        let frame = square_frame(100, 100, 50.0, 50.0, 20.0);
        let blank = GrayImage::filled(100, 100, 0.1);
        let mut t =
            Tracker::init(&frame, BoundingBox::new(40.0, 40.0, 20.0, 20.0), TrackerConfig::default()).unwrap();
        for i in 2..=7 {
            let f = if i % 2 == 0 { &blank } else { &frame };
            let (_, d) = t.track_frame(f).unwrap();
            assert_eq!(d.gate, GateDecision::Warmup);
        }
        assert_eq!(t.state().stats.count, 6);
    }

    #[test]
    fn box_stays_inside_frame() {
        // the target runs off the right edge
        let mut t = None;
        for i in 0..40 {
            let cx = 70.0 + 4.0 * i as f64;
            let frame = square_frame(100, 80, cx, 40.0, 16.0);
            match t.as_mut() {
                None => {
                    t = Some(
                        Tracker::init(
                            &frame,
                            BoundingBox::new(cx - 8.0, 32.0, 16.0, 16.0),
                            TrackerConfig { feature_mode: FeatureMode::Gray, ..Default::default() },
                        )
                        .unwrap(),
                    )
                }
                Some(tr) => {
                    let (b, _) = tr.track_frame(&frame).unwrap();
                    let c = b.center();
                    assert!((0.0..=100.0).contains(&c.x) && (0.0..=80.0).contains(&c.y));
                }
            }
        }
    }

    #[test]
    fn single_precision_tracker_runs() {
        let frame: GrayImage<f32> = GrayImage::from_fn(90, 90, |x, y| {
            if (30..50).contains(&x) && (30..50).contains(&y) { 0.8 } else { 0.1 }
        });
        let mut t = Tracker::<f32>::init(&frame, BoundingBox::new(30.0, 30.0, 20.0, 20.0), TrackerConfig::default())
            .unwrap();
        let (b, _) = t.track_frame(&frame).unwrap();
        assert_eq!(b, BoundingBox::new(30.0, 30.0, 20.0, 20.0));
    }
}
