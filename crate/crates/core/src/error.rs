use thiserror::Error;

/// Errors produced by grid construction, discrete operators and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 2 or 4, got {0}")]
    InvalidDimension(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid too coarse: need at least {needed} nodes, got {got}")]
    GridTooCoarse { needed: usize, got: usize },

    #[error("field contains non-finite values ({context})")]
    NonFinite { context: &'static str },

    #[error("exponential overflow guard tripped: exp argument {arg:.3e} exceeds {limit}")]
    Overflow { arg: f64, limit: f64 },

    #[error("field is identically zero where a nonzero field is required")]
    ZeroField,

    #[error(
        "field does not decay at the outer boundary (tail {tail:.3e} above tolerance {tol:.3e})"
    )]
    NonDecaying { tail: f64, tol: f64 },

    #[error("{context}: no convergence within {iterations} iterations")]
    NonConvergence {
        context: &'static str,
        iterations: usize,
    },

    #[error("oscillatory quadrature did not converge at r = {r:.6e} (error estimate {err:.3e})")]
    QuadratureDidNotConverge { r: f64, err: f64 },

    #[error("extrapolation of the regular part did not settle (spread {spread:.3e} > {tol:.3e})")]
    ExtrapolationUnsettled { spread: f64, tol: f64 },

    #[error("linear solve failed: {0}")]
    SingularSystem(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
