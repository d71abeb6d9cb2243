use octkcf::kcf::train;
use octkcf::synth::{generate, SceneSpec, SyntheticSequence};
use octkcf::{BoundingBox, Diagnostics, GateDecision, GrayImage, Tracker, TrackerConfig, TrackerMode};

struct Run {
    boxes: Vec<BoundingBox<f64>>,
    diags: Vec<Diagnostics<f64>>,
}

fn track(seq: &SyntheticSequence, cfg: TrackerConfig) -> Run {
    let mut t = Tracker::<f64>::init(&seq.frames[0], seq.ground_truth[0], cfg).unwrap();
    let mut boxes = vec![t.current_box()];
    let mut diags = Vec::new();
    for f in &seq.frames[1..] {
        let (b, d) = t.track_frame(f).unwrap();
        boxes.push(b);
        diags.push(d);
    }
    Run { boxes, diags }
}

fn cles(seq: &SyntheticSequence, run: &Run) -> Vec<f64> {
    run.boxes.iter().zip(&seq.ground_truth).map(|(b, g)| b.center().distance(&g.center())).collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn constant_velocity_both_modes() {
    let seq = generate(&SceneSpec::constant_velocity()).unwrap();
    for mode in [TrackerMode::Kcf, TrackerMode::OctKcf] {
        let run = track(&seq, TrackerConfig::with_mode(mode));
        let m = mean(&cles(&seq, &run));
        assert!(m < 4.0, "{mode:?}: mean CLE {m}");
    }
}

#[test]
fn gate_stays_quiet_on_clean_sequence() {
    let seq = generate(&SceneSpec::clean()).unwrap();
    let run = track(&seq, TrackerConfig::default());
    let fired: Vec<usize> =
        run.diags.iter().filter(|d| d.gate == GateDecision::Drift).map(|d| d.frame_index).collect();
    assert!(fired.is_empty(), "gate fired at {fired:?}");
    assert!(mean(&cles(&seq, &run)) < 4.0);
}

#[test]
fn occlusion_fires_gate_and_recovers() {
    let spec = SceneSpec::occluded();
    let occ = spec.occlusion.clone().unwrap();
    let seq = generate(&spec).unwrap();
    let run = track(&seq, TrackerConfig::default());

    // diags[i] belongs to 0-based frame i + 1
    let fired_inside = run.diags.iter().enumerate().any(|(i, d)| occ.contains(&(i + 1)) && d.redetected);
    assert!(fired_inside, "gate never fired during the occlusion");

    let errs = cles(&seq, &run);
    let back = occ.end;
    let first_ok = (back..errs.len()).find(|&i| errs[i] < 10.0).expect("never recovered");
    assert!(first_ok - back < 10, "recovered only at frame {first_ok}");
    assert!(errs[first_ok..].iter().all(|&e| e < 10.0), "lost again after recovery: {:?}", &errs[first_ok..]);
}

#[test]
fn static_scene_is_stationary() {
    let seq = generate(&SceneSpec::static_scene()).unwrap();
    for mode in [TrackerMode::Kcf, TrackerMode::OctKcf] {
        let run = track(&seq, TrackerConfig::with_mode(mode));
        assert_eq!(run.boxes.len(), 50);
        assert!(run.boxes.iter().all(|b| *b == run.boxes[0]), "{mode:?} moved");
        assert!(run.diags.iter().all(|d| !d.redetected));
    }
}

#[test]
fn trajectories_are_bit_identical_across_runs() {
    let seq = generate(&SceneSpec::occluded()).unwrap();
    let a = track(&seq, TrackerConfig::default());
    let b = track(&seq, TrackerConfig::default());
    assert_eq!(a.boxes, b.boxes);
    assert_eq!(a.diags, b.diags);
}

#[test]
fn no_gate_before_warmup_and_one_stats_sample_per_frame() {
    let seq = generate(&SceneSpec::occluded()).unwrap();
    let cfg = TrackerConfig::default();
    let mut t = Tracker::<f64>::init(&seq.frames[0], seq.ground_truth[0], cfg.clone()).unwrap();
    for (i, f) in seq.frames.iter().enumerate().skip(1) {
        let (_, d) = t.track_frame(f).unwrap();
        assert_eq!(d.frame_index, i + 1);
        assert_eq!(t.state().stats.count, i);
        if d.frame_index <= cfg.warmup_frames {
            assert_eq!(d.gate, GateDecision::Warmup);
        } else {
            assert_ne!(d.gate, GateDecision::Warmup);
        }
    }
}

#[test]
fn s_zero_without_gate_is_per_frame_retraining() {
    let seq = generate(&SceneSpec::clean()).unwrap();
    let cfg = TrackerConfig { s: 0.0, t_g: f64::INFINITY, ..TrackerConfig::default() };
    let mut t = Tracker::<f64>::init(&seq.frames[0], seq.ground_truth[0], cfg).unwrap();
    for f in &seq.frames[1..] {
        let (b, d) = t.track_frame(f).unwrap();
        assert!(!d.redetected);
        let x = t.extractor().extract(f, b.center()).unwrap();
        let m = t.model();
        let fresh = train(t.engine(), &x, &m.label_spectrum, m.lambda, m.sigma).unwrap();
        assert_eq!(m.alpha_hat, fresh);
    }
}

#[test]
fn box_never_leaves_the_frame() {
    let spec = SceneSpec { velocity: (6.0, -3.0), frames: 60, ..SceneSpec::clean() };
    let seq = generate(&spec).unwrap();
    for mode in [TrackerMode::Kcf, TrackerMode::OctKcf] {
        let run = track(&seq, TrackerConfig::with_mode(mode));
        for b in &run.boxes {
            let c = b.center();
            assert!((0.0..=spec.width as f64).contains(&c.x) && (0.0..=spec.height as f64).contains(&c.y), "{b:?}");
        }
    }
}

#[test]
fn single_precision_tracker() {
    let seq = generate(&SceneSpec::constant_velocity()).unwrap();
    let frames: Vec<GrayImage<f32>> = seq
        .frames
        .iter()
        .map(|f| GrayImage::new(f.width(), f.height(), f.pixels().iter().map(|&p| p as f32).collect()).unwrap())
        .collect();
    let mut t = octkcf::Tracker32::init(&frames[0], seq.ground_truth[0].cast(), TrackerConfig::default()).unwrap();
    let mut total = 0.0;
    for (i, f) in frames.iter().enumerate().skip(1) {
        let (b, _) = t.track_frame(f).unwrap();
        total += b.cast::<f64>().center().distance(&seq.center(i));
    }
    assert!(total / 59.0 < 4.0);
}

#[test]
fn gray_features_track_too() {
    let seq = generate(&SceneSpec::constant_velocity()).unwrap();
    let cfg = TrackerConfig { feature_mode: octkcf::FeatureMode::Gray, cell_size: 1, ..TrackerConfig::default() };
    let run = track(&seq, cfg);
    assert!(mean(&cles(&seq, &run)) < 4.0);
}
