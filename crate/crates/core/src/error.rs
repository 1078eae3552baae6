use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building, solving or analysing a discretization.
#[derive(Debug, Error)]
pub enum FgigError {
    #[error("Gegenbauer index {lambda} must exceed -1/2 + {guard}")]
    InvalidLambda { lambda: f64, guard: f64 },

    #[error("highest node index M must be at least 1, got {0}")]
    InvalidOrder(usize),

    #[error("time horizon must be positive, got {0}")]
    InvalidHorizon(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("time {t} lies outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("imaginary synthesis residue {residue:e} exceeds tolerance; coefficients are not conjugate symmetric")]
    ImaginaryResidue { residue: f64 },

    #[error("collocation system for mode n = {mode} is singular or ill-conditioned (pivot {pivot:e}, threshold {threshold:e})")]
    SingularSystem {
        mode: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("problem '{0}' has no exact solution")]
    MissingExact(String),

    #[error("unknown test problem id {0} (expected 1, 2 or 3)")]
    UnknownProblem(i64),

    #[error("config key '{key}': {message}")]
    Config { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, FgigError>;
