//! Synthesizes the two-panel distribution-comparison stimuli used in graph
//! perception studies — probability density curves, quantile dot plots, and
//! "croissant" charts (equal-probability slices of a density curve) — renders
//! them to deterministic SVG, scores idealized reading strategies against
//! each chart's geometry, and simulates a between-subjects comparison
//! experiment complete with a logistic model of response correctness.

pub mod config;
pub mod dist;
mod error;
pub mod oracle;
pub mod scene;
pub mod sim;
pub mod stimuli;
pub mod svg;

pub use error::{Error, Result};
