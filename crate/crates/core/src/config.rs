//! Tracker configuration and its flat `key=value` file format.
//!
//! ```text
//! # comment
//! lambda=1e-4
//! s=1000
//! t_g=1.6
//! mode=oct-kcf
//! ```
//!
//! Unknown keys are errors.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::FeatureMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrackerMode {
    /// Plain KCF: fixed-rate interpolation, no drift gate.
    Kcf,
    /// Output-constrained update with drift gate and polar redetection.
    OctKcf,
}

impl TrackerMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrackerMode::Kcf => "kcf",
            TrackerMode::OctKcf => "oct-kcf",
        }
    }
}

impl FromStr for TrackerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kcf" => Ok(TrackerMode::Kcf),
            "oct-kcf" | "oct_kcf" | "octkcf" => Ok(TrackerMode::OctKcf),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fhog" | "hog" => Ok(FeatureMode::Fhog),
            "gray" | "grey" | "raw" => Ok(FeatureMode::Gray),
            other => Err(Error::InvalidParameter(format!("unknown feature mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackerConfig {
    /// Ridge regularization λ.
    pub lambda: f64,
    /// Weight of the filter-continuity constraint.
    pub s: f64,
    pub kernel_sigma: f64,
    /// Drift-gate threshold on the response z-score.
    pub t_g: f64,
    /// Polar redetection rings.
    pub n_r: usize,
    /// Polar redetection angles per ring.
    pub n_t: usize,
    /// Search window size relative to the target.
    pub search_scale: f64,
    /// Frames (including the initial one) before the gate activates.
    pub warmup_frames: usize,
    pub cell_size: usize,
    pub feature_mode: FeatureMode,
    pub mode: TrackerMode,
    /// Interpolation rate of the plain KCF update.
    pub kcf_rate: f64,
    /// Redetection radius as a multiple of `max(w, h)`.
    pub redetect_radius_factor: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            s: 1000.0,
            kernel_sigma: 0.5,
            t_g: 1.6,
            n_r: 5,
            n_t: 16,
            search_scale: 1.5,
            warmup_frames: 7,
            cell_size: 4,
            feature_mode: FeatureMode::Fhog,
            mode: TrackerMode::OctKcf,
            kcf_rate: 0.02,
            redetect_radius_factor: 1.0,
        }
    }
}

pub const CONFIG_KEYS: &[&str] = &[
    "lambda",
    "s",
    "kernel_sigma",
    "t_g",
    "n_r",
    "n_t",
    "search_scale",
    "warmup_frames",
    "cell_size",
    "feature_mode",
    "mode",
    "kcf_rate",
    "redetect_radius_factor",
];

impl TrackerConfig {
    pub fn with_mode(mode: TrackerMode) -> Self {
        Self { mode, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda = {} must be positive", self.lambda));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return bad(format!("s = {} must be non-negative", self.s));
        }
        if !(self.kernel_sigma > 0.0 && self.kernel_sigma.is_finite()) {
            return bad(format!("kernel_sigma = {} must be positive", self.kernel_sigma));
        }
        // t_g = inf disables the gate
        if !(self.t_g > 0.0) {
            return bad(format!("t_g = {} must be positive", self.t_g));
        }
        if self.n_r == 0 || self.n_t == 0 {
            return bad(format!("n_r = {}, n_t = {} must be positive", self.n_r, self.n_t));
        }
        if !(self.search_scale > 0.0 && self.search_scale.is_finite()) {
            return bad(format!("search_scale = {} must be positive", self.search_scale));
        }
        if self.warmup_frames == 0 {
            return bad("warmup_frames must be positive".into());
        }
        if self.cell_size == 0 {
            return bad("cell_size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.kcf_rate) {
            return bad(format!("kcf_rate = {} outside [0, 1]", self.kcf_rate));
        }
        if !(self.redetect_radius_factor > 0.0 && self.redetect_radius_factor.is_finite()) {
            return bad(format!(
                "redetect_radius_factor = {} must be positive",
                self.redetect_radius_factor
            ));
        }
        Ok(())
    }

    /// Sets one field from its textual key and value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<V: FromStr>(key: &str, value: &str) -> Result<V> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse {value:?}")))
        }
        match key.trim() {
            "lambda" => self.lambda = num(key, value)?,
            "s" => self.s = num(key, value)?,
            "kernel_sigma" => self.kernel_sigma = num(key, value)?,
            "t_g" => self.t_g = num(key, value)?,
            "n_r" => self.n_r = num(key, value)?,
            "n_t" => self.n_t = num(key, value)?,
            "search_scale" => self.search_scale = num(key, value)?,
            "warmup_frames" => self.warmup_frames = num(key, value)?,
            "cell_size" => self.cell_size = num(key, value)?,
            "feature_mode" => self.feature_mode = value.parse()?,
            "mode" => self.mode = value.parse()?,
            "kcf_rate" => self.kcf_rate = num(key, value)?,
            "redetect_radius_factor" => self.redetect_radius_factor = num(key, value)?,
            other => return Err(Error::InvalidParameter(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines on top of `self`.
    pub fn apply_kv(&mut self, text: &str, origin: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config { path: origin.to_string(), line: i + 1, msg };
            let (key, value) =
                line.split_once('=').ok_or_else(|| err(format!("expected key=value, got {line:?}")))?;
            self.set(key, value).map_err(|e| err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_kv(text, "<string>")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_kv(&text, &path.display().to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lambda={}", self.lambda);
        let _ = writeln!(out, "s={}", self.s);
        let _ = writeln!(out, "kernel_sigma={}", self.kernel_sigma);
        let _ = writeln!(out, "t_g={}", self.t_g);
        let _ = writeln!(out, "n_r={}", self.n_r);
        let _ = writeln!(out, "n_t={}", self.n_t);
        let _ = writeln!(out, "search_scale={}", self.search_scale);
        let _ = writeln!(out, "warmup_frames={}", self.warmup_frames);
        let _ = writeln!(out, "cell_size={}", self.cell_size);
        let _ = writeln!(out, "feature_mode={}", self.feature_mode.as_str());
        let _ = writeln!(out, "mode={}", self.mode.as_str());
        let _ = writeln!(out, "kcf_rate={}", self.kcf_rate);
        let _ = writeln!(out, "redetect_radius_factor={}", self.redetect_radius_factor);
        out
    }

    /// Short label used for result file names.
    pub fn label(&self) -> String {
        self.mode.as_str().to_string()
    }
}
