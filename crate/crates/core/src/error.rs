use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid capacitor specification: {0}")]
    InvalidSpec(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("singular linear system (pivot {pivot} at row {row})")]
    Singular { row: usize, pivot: f64 },

    #[error("problem too large for dense solve: N = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error(
        "SOR did not converge for d = {d} after {iterations} sweeps (last update {final_update:e})"
    )]
    NotConverged {
        d: f64,
        iterations: usize,
        final_update: f64,
    },

    #[error("{model} training diverged at epoch {epoch}: non-finite loss")]
    Diverged { model: &'static str, epoch: usize },

    #[error("non-finite gradient passed to optimizer")]
    NonFiniteGradient,

    #[error("degenerate regression model: coefficient vector is zero")]
    DegenerateModel,

    #[error("all-zero feature matrix")]
    ZeroFeatures,

    #[error("boundary term requested (lambda = {lambda}) but no sample is supervised")]
    NoSupervisedSamples { lambda: f64 },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("truncated payload: {0}")]
    Truncated(String),

    #[error("malformed file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },

    #[error("point ({x}, {y}) lies within {h} of the quadrant boundary")]
    PointNearBoundary { x: f64, y: f64, h: f64 },

    #[error("{method}: {source}")]
    Method {
        method: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attaches the name of the experiment method that produced the error.
    pub fn in_method(self, method: impl Into<String>) -> Self {
        let method = method.into();
        match self {
            Error::Method { method: ref m, .. } if *m == method => self,
            other => Error::Method {
                method,
                source: Box::new(other),
            },
        }
    }

    /// True when the root cause is a training abort (divergence or a bad gradient).
    pub fn is_training_abort(&self) -> bool {
        match self {
            Error::Diverged { .. } | Error::NonFiniteGradient | Error::NotConverged { .. } => true,
            Error::Method { source, .. } => source.is_training_abort(),
            _ => false,
        }
    }

    /// True when the root cause is a configuration or specification problem.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::InvalidSpec(_) | Error::InvalidGrid(_) | Error::InvalidConfig(_) => true,
            Error::Method { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
