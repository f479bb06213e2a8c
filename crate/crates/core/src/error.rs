//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level {requested} exceeds the allowed maximum {max}")]
    LevelOutOfRange { requested: u32, max: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "inadmissible pair (lambda = {lambda}, p = {p}): 2*lambda^(2-p) = {value:.6} >= 1; \
         requires p < {threshold:.6}"
    )]
    Inadmissible {
        lambda: f64,
        p: f64,
        value: f64,
        threshold: f64,
    },

    #[error("raster resolution {requested} exceeds the memory cap {cap}")]
    ResolutionCap { requested: usize, cap: usize },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("C = {requested:.6} is below the attainable minimum {c_min:.6}")]
    BelowThreshold { requested: f64, c_min: f64 },

    #[error(
        "quadrature did not converge within {budget} subintervals \
         (worst subinterval [{a:.9}, {b:.9}], error estimate {err:.3e})"
    )]
    QuadratureBudget {
        budget: usize,
        a: f64,
        b: f64,
        err: f64,
    },

    #[error("curve enters the open domain at ({x:.9}, {y:.9})")]
    OutsideComplement { x: f64, y: f64 },

    #[error("no grid s satisfies the net bound; first violation at level {level}, ball {ball} (N = {count})")]
    NoPassingS { level: i32, ball: usize, count: u32 },

    #[error("center ({x:.9}, {y:.9}) is not within {band:.3e} of the boundary")]
    NotNearBoundary { x: f64, y: f64, band: f64 },

    #[error("integration failed for the pair ({x1:.9}, {y1:.9}) -- ({x2:.9}, {y2:.9}): {source}")]
    PairIntegration {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
