use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("finite-difference stencil of width {h} at distance {radius} would reach the origin")]
    StencilOrigin { radius: f64, h: f64 },

    /// Adaptive quadrature hit its refinement cap; carries the best estimate.
    #[error("quadrature did not reach tolerance {tol:e}: best value {value}, error estimate {error_estimate:e}")]
    Quadrature {
        value: f64,
        error_estimate: f64,
        tol: f64,
    },

    #[error("bisection for eigenvalue #{index} did not converge within {iterations} iterations")]
    Bisection { index: usize, iterations: usize },

    /// The numerics disagree with the analytic prediction.
    #[error("numerical diagnostic failure: {0}")]
    Diagnostic(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
