use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

/// Precision thresholds `0, 1, …, 50` px.
pub const PRECISION_THRESHOLDS: usize = 51;
/// Overlap thresholds `0, 0.05, …, 1`.
pub const SUCCESS_THRESHOLDS: usize = 21;

/// Center location error in pixels.
pub fn cle(a: &BoundingBox<f64>, b: &BoundingBox<f64>) -> f64 {
    a.center().distance(&b.center())
}

/// Intersection over union, in `[0, 1]`.
pub fn iou(a: &BoundingBox<f64>, b: &BoundingBox<f64>) -> f64 {
    let inter = a.intersection(b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

pub fn overlap_threshold(i: usize) -> f64 {
    i as f64 / (SUCCESS_THRESHOLDS - 1) as f64
}

/// `curve[θ]` = fraction of frames with CLE ≤ θ.
pub fn precision_curve(cles: &[f64]) -> Result<Vec<f64>> {
    if cles.is_empty() {
        return Err(Error::Empty("CLE list"));
    }
    let n = cles.len() as f64;
    Ok((0..PRECISION_THRESHOLDS)
        .map(|t| cles.iter().filter(|&&c| c <= t as f64).count() as f64 / n)
        .collect())
}

/// `curve[i]` = fraction of frames with IoU ≥ `i/20`.
///
/// Inclusive so that a perfect trajectory scores 1 at every threshold,
/// including 1.0 itself.
pub fn success_curve(ious: &[f64]) -> Result<Vec<f64>> {
    if ious.is_empty() {
        return Err(Error::Empty("IoU list"));
    }
    let n = ious.len() as f64;
    Ok((0..SUCCESS_THRESHOLDS)
        .map(|i| {
            let tau = overlap_threshold(i);
            ious.iter().filter(|&&v| v >= tau).count() as f64 / n
        })
        .collect())
}

/// Arithmetic mean of a curve.
pub fn auc(curve: &[f64]) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::Empty("curve"));
    }
    Ok(curve.iter().sum::<f64>() / curve.len() as f64)
}

/// Precision at an integer pixel threshold.
pub fn precision_at(curve: &[f64], px: usize) -> f64 {
    curve.get(px).copied().unwrap_or(f64::NAN)
}

/// Metrics of one tracker on one sequence, over frames with ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub cle: Vec<f64>,
    pub iou: Vec<f64>,
    pub precision: Vec<f64>,
    pub success: Vec<f64>,
    pub auc: f64,
    pub fps: f64,
}

impl EvalRecord {
    pub fn from_pairs(pairs: &[(BoundingBox<f64>, BoundingBox<f64>)], fps: f64) -> Result<Self> {
        let cles: Vec<f64> = pairs.iter().map(|(p, g)| cle(p, g)).collect();
        let ious: Vec<f64> = pairs.iter().map(|(p, g)| iou(p, g)).collect();
        let precision = precision_curve(&cles)?;
        let success = success_curve(&ious)?;
        let auc = auc(&success)?;
        Ok(Self { cle: cles, iou: ious, precision, success, auc, fps })
    }

    pub fn precision_20(&self) -> f64 {
        precision_at(&self.precision, 20)
    }

    pub fn mean_cle(&self) -> f64 {
        self.cle.iter().sum::<f64>() / self.cle.len() as f64
    }
}
