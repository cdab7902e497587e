//! Crate-wide error type.

use std::path::PathBuf;

/// Everything that can go wrong while building, rendering, reading, or
/// simulating stimuli.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A distribution parameter is out of its domain.
    #[error("standard deviation must be positive and finite, got {0}")]
    InvalidSigma(f64),

    /// The mean is not a finite number.
    #[error("mean must be finite, got {0}")]
    InvalidMu(f64),

    /// A probability argument fell outside the open unit interval.
    #[error("probability must lie strictly between 0 and 1, got {0}")]
    ProbabilityOutOfRange(f64),

    /// Too few quantiles for the requested operation.
    #[error("quantile count must be at least {min}, got {got}")]
    TooFewQuantiles { min: u32, got: u32 },

    /// A comparison task needs both distributions centered on the same mean.
    #[error("comparison requires a shared mean: top mu = {top}, bottom mu = {bottom}")]
    MeanMismatch { top: f64, bottom: f64 },

    /// The comparison threshold must sit strictly above the shared mean.
    #[error("threshold {threshold} must lie strictly above the shared mean {mu}")]
    ThresholdNotAboveMean { threshold: f64, mu: f64 },

    /// A stimulus description is internally inconsistent.
    #[error("invalid stimulus: {0}")]
    InvalidStimulus(String),

    /// A layout, style, mixture, or model configuration value is unusable.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The requested reading strategy has nothing to read on this chart kind.
    #[error("strategy {strategy} is not afforded by {vis} charts")]
    NotAfforded {
        strategy: &'static str,
        vis: &'static str,
    },

    /// Refused to replace an existing file.
    #[error("refusing to overwrite existing file {}", .0.display())]
    WouldOverwrite(PathBuf),

    /// An I/O operation failed; carries what was attempted and where.
    #[error("{context} {}: {source}", .path.display())]
    Io {
        context: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },

    /// Trial data could not be parsed.
    #[error("invalid trial data: {0}")]
    InvalidTrials(String),

    /// Model fitting could not proceed (e.g., a singular information matrix).
    #[error("model fit failed: {0}")]
    FitFailed(String),
}

impl Error {
    /// Wraps an I/O error with the operation and path it belongs to.
    pub fn io(context: &'static str, path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            context,
            path: path.into(),
            source,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
