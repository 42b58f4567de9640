use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zeta has a pole at s = 1")]
    PoleAtOne,

    #[error("argument {arg} outside the supported domain ({reason})")]
    Domain { arg: Complex64, reason: &'static str },

    #[error("precision target {target:e} unreachable within {max_terms} series terms")]
    PrecisionUnreachable { target: f64, max_terms: usize },

    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: Complex64 },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("sieve length {requested} exceeds capacity {limit}")]
    Capacity { requested: u64, limit: u64 },

    #[error("invalid mollifier length N = {0} (need N >= 2)")]
    InvalidLength(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge within {max_panels} panels")]
    QuadratureNonConvergence { max_panels: usize },

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("no sign change of Z(t) within +-{window} of ordinate {ordinate}")]
    RefinementFailure { ordinate: f64, window: f64 },

    #[error("s = {s} lies within {distance:e} of zero {rho}")]
    NearCollision {
        s: Complex64,
        rho: Complex64,
        distance: f64,
    },

    #[error("series did not converge within {terms} terms")]
    SeriesNonConvergence { terms: usize },

    #[error("contour of radius {radius:e} around {rho} encloses another singularity")]
    Contour { rho: Complex64, radius: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("degenerate fit grid: {0}")]
    DegenerateGrid(String),

    #[error("least-squares design matrix is rank deficient")]
    RankDeficient,
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}
