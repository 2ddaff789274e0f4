//! Error types shared across the toolkit.

use thiserror::Error;

/// Errors produced by the spectral toolkit.
#[derive(Error, Debug)]
pub enum DssError {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("resolution limit: {0}")]
    ResolutionLimit(String),

    #[error("smallness violation: {0}")]
    SmallnessViolation(String),

    #[error("fixed-point iteration diverged: {0}")]
    FixedPointDiverged(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<DssError>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("bad file format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, DssError>;

impl DssError {
    /// Wrap an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        DssError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
