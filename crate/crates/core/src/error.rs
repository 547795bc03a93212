use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the bound, quadrature, series and simulation routines.
///
/// Numeric payloads are stored as `f64` whatever the scalar type of the
/// computation that failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("entropy integral diverges / closed form invalid: gamma*beta = {gamma_beta} must exceed 1")]
    EntropyDiverges { gamma_beta: f64 },

    #[error("below validity threshold: u = {u} must exceed {threshold}")]
    BelowThreshold { u: f64, threshold: f64 },

    #[error("invalid theta {theta}: {reason}")]
    InvalidTheta { theta: f64, reason: String },

    #[error("no valid theta for u = {u}: the smallest admissible level is {inf_threshold}")]
    NoValidTheta { u: f64, inf_threshold: f64 },

    #[error(
        "quadrature did not converge: estimate {estimate}, error estimate {error_estimate} \
         exceeds tolerance {tolerance} after {intervals} intervals"
    )]
    Quadrature {
        estimate: f64,
        error_estimate: f64,
        tolerance: f64,
        intervals: usize,
    },

    #[error("series did not certify convergence after {terms} terms (partial sum {partial}): {reason}")]
    SeriesDivergence {
        terms: usize,
        partial: f64,
        reason: String,
    },

    #[error("covering grid too coarse: resolution {resolution} gives d-step {step} on axis {axis}, need at most {limit}")]
    CoarseResolution {
        resolution: usize,
        axis: usize,
        step: f64,
        limit: f64,
    },

    #[error("covariance factorization failed even with jitter {jitter} (relative to max variance)")]
    Factorization { jitter: f64 },

    #[error("curves do not share the same u grid: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
