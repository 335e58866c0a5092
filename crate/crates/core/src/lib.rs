//! Evaluation toolkit for deformable image registration.
//!
//! The crate covers the full measurement pipeline used to compare
//! registration methods on brain MRI: NIfTI I/O, displacement-field algebra,
//! per-pair metrics (Dice, HD95, TRE, non-diffeomorphic volume), robustness
//! statistics, significance-test ranking, synthetic cohorts with analytic
//! ground truth, and a reference optimization-based registration method.
//!
//! Voxel loops run on rayon when the default `parallel` feature is enabled
//! and sequentially otherwise; results are bit-identical either way.

pub mod error;
pub mod filter;
pub mod metrics;

pub mod par;
pub mod ranking;
pub mod refreg;
pub mod stats;
pub mod synth;
pub mod volio;
pub mod volume;
pub mod warp;

pub use error::{Error, Result};
pub use volume::{AffineHeader, DataType, Dims, DisplacementField, LabelVolume, ScalarVolume, VelocityField};
