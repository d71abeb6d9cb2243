use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;

use super::metrics::{auc, precision_at, EvalRecord, PRECISION_THRESHOLDS, SUCCESS_THRESHOLDS};
use super::sequence::Sequence;
use crate::config::TrackerConfig;
use crate::error::{Error, Result};
use crate::frame::GrayImage;
use crate::geometry::BoundingBox;
use crate::tracker::{Diagnostics, Tracker};

/// One output row; frame 1 carries no diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameRow {
    pub frame: usize,
    pub pred: BoundingBox<f64>,
    pub gt: Option<BoundingBox<f64>>,
    pub diagnostics: Option<Diagnostics<f64>>,
}

#[derive(Clone, Debug)]
pub struct SequenceRun {
    pub sequence: String,
    pub label: String,
    pub rows: Vec<FrameRow>,
    pub record: EvalRecord,
    /// Time spent in tracker calls, excluding frame decoding.
    pub tracking_time: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub sequence: String,
    pub label: String,
    pub message: String,
}

/// Per-configuration average over sequences.
#[derive(Clone, Debug)]
pub struct AggregateRecord {
    pub label: String,
    pub sequences: usize,
    pub frames: usize,
    /// Mean of the per-sequence precision curves.
    pub precision: Vec<f64>,
    /// Mean of the per-sequence success curves.
    pub success: Vec<f64>,
    pub auc: f64,
    /// Total frames over total tracking time.
    pub fps: f64,
}

impl AggregateRecord {
    pub fn precision_20(&self) -> f64 {
        precision_at(&self.precision, 20)
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    /// Ordered by sequence name, then by configuration order.
    pub runs: Vec<SequenceRun>,
    pub failures: Vec<Failure>,
    /// One per configuration, in configuration order.
    pub aggregates: Vec<AggregateRecord>,
}

/// Tracks one sequence from its first annotated box.
pub fn track_sequence(seq: &Sequence, cfg: &TrackerConfig) -> Result<SequenceRun> {
    let init = seq.init_box()?;
    let mut clock = Duration::ZERO;
    let mut rows = Vec::with_capacity(seq.frames.len());

    let first = GrayImage::<f64>::load(&seq.frames[0])?;
    let start = Instant::now();
    let mut tracker = Tracker::init(&first, init, cfg.clone())?;
    clock += start.elapsed();
    rows.push(FrameRow { frame: 1, pred: tracker.current_box(), gt: seq.ground_truth[0], diagnostics: None });

    for (i, path) in seq.frames.iter().enumerate().skip(1) {
        let frame = GrayImage::<f64>::load(path)?;
        let start = Instant::now();
        let (pred, diag) = tracker.track_frame(&frame)?;
        clock += start.elapsed();
        rows.push(FrameRow { frame: i + 1, pred, gt: seq.ground_truth[i], diagnostics: Some(diag) });
    }

    let pairs: Vec<_> = rows.iter().filter_map(|r| r.gt.map(|g| (r.pred, g))).collect();
    let fps = rows.len() as f64 / clock.as_secs_f64().max(1e-9);
    let record = EvalRecord::from_pairs(&pairs, fps)?;
    Ok(SequenceRun { sequence: seq.name.clone(), label: cfg.label(), rows, record, tracking_time: clock })
}

fn aggregate(label: &str, runs: &[&SequenceRun]) -> Option<AggregateRecord> {
    if runs.is_empty() {
        return None;
    }
    let n = runs.len() as f64;
    let mean_curve = |len: usize, get: &dyn Fn(&SequenceRun) -> &Vec<f64>| -> Vec<f64> {
        (0..len).map(|i| runs.iter().map(|r| get(r)[i]).sum::<f64>() / n).collect()
    };
    let precision = mean_curve(PRECISION_THRESHOLDS, &|r| &r.record.precision);
    let success = mean_curve(SUCCESS_THRESHOLDS, &|r| &r.record.success);
    let frames: usize = runs.iter().map(|r| r.rows.len()).sum();
    let secs: f64 = runs.iter().map(|r| r.tracking_time.as_secs_f64()).sum();
    Some(AggregateRecord {
        label: label.to_string(),
        sequences: runs.len(),
        frames,
        auc: auc(&success).ok()?,
        precision,
        success,
        fps: frames as f64 / secs.max(1e-9),
    })
}

/// Runs every configuration on every sequence, `jobs` sequences at a time
/// (0 = one per logical core). Failed runs are reported and skipped.
pub fn run_benchmark(sequences: &[Sequence], cfgs: &[TrackerConfig], jobs: usize) -> Result<BenchReport> {
    if sequences.is_empty() {
        return Err(Error::Empty("sequence list"));
    }
    if cfgs.is_empty() {
        return Err(Error::Empty("configuration list"));
    }
    let mut labels: Vec<String> = cfgs.iter().map(TrackerConfig::label).collect();
    labels.sort();
    labels.dedup();
    if labels.len() != cfgs.len() {
        return Err(Error::InvalidParameter("configurations must have distinct labels".into()));
    }
    let mut order: Vec<&Sequence> = sequences.iter().collect();
    order.sort_by(|a, b| a.name.cmp(&b.name));
    let work: Vec<(&Sequence, &TrackerConfig)> =
        order.iter().flat_map(|s| cfgs.iter().map(move |c| (*s, c))).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<Result<SequenceRun>> = pool.install(|| {
        work.par_iter()
            .map(|(seq, cfg)| {
                let r = track_sequence(seq, cfg);
                if r.is_ok() {
                    info!("{} [{}] done", seq.name, cfg.label());
                }
                r
            })
            .collect()
    });

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for ((seq, cfg), res) in work.iter().zip(results) {
        match res {
            Ok(run) => runs.push(run),
            Err(e) => {
                warn!("{} [{}] failed: {e}", seq.name, cfg.label());
                failures.push(Failure { sequence: seq.name.clone(), label: cfg.label(), message: e.to_string() });
            }
        }
    }
    let aggregates = cfgs
        .iter()
        .filter_map(|c| {
            let label = c.label();
            let mine: Vec<&SequenceRun> = runs.iter().filter(|r| r.label == label).collect();
            aggregate(&label, &mine)
        })
        .collect();
    Ok(BenchReport { runs, failures, aggregates })
}
