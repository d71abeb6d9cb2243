//! Kernelized correlation filter tracking with an output-constrained model
//! update, a response drift gate and polar-grid redetection.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the bottom of this file name the common instantiations.

pub mod config;
pub mod error;
pub mod eval;
pub mod features;
pub mod frame;
pub mod geometry;
pub mod kcf;
pub mod oct;
pub mod oracle;
pub mod redetect;
pub mod scalar;
pub mod selftest;
pub mod spectral;
pub mod synth;
pub mod tracker;

pub use config::{TrackerConfig, TrackerMode};
pub use error::{Error, Result};
pub use features::{FeatureExtractor, FeatureMode, FeaturePatch};
pub use frame::GrayImage;
pub use geometry::{BoundingBox, Point};
pub use kcf::{Detection, FilterModel};
pub use oct::{OctConfig, ResponseStats};
pub use scalar::Scalar;
pub use spectral::{FftEngine, RealPlane, SpectralPlane};
pub use tracker::{Diagnostics, GateDecision, Tracker};

pub type Tracker64 = Tracker<f64>;
pub type Tracker32 = Tracker<f32>;
pub type GrayImage64 = GrayImage<f64>;
pub type GrayImage32 = GrayImage<f32>;
pub type BoundingBox64 = BoundingBox<f64>;
pub type BoundingBox32 = BoundingBox<f32>;
pub type FeaturePatch64 = FeaturePatch<f64>;
pub type FeaturePatch32 = FeaturePatch<f32>;
