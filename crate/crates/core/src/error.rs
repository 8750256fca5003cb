use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive definite: pivot {pivot:e} at row {row}")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    /// The monomial Gram matrix is too ill-conditioned for a faithful whitening.
    #[error("ill-conditioned Gram matrix at degree {degree}: pivot ratio {pivot_ratio:e}, whitening residual {residual:e}")]
    IllConditioned {
        degree: usize,
        pivot_ratio: f64,
        residual: f64,
    },

    #[error("quadrature did not reach tolerance {tol:e} within {budget} evaluations")]
    QuadratureBudget { tol: f64, budget: usize },

    #[error("point at chart radius {radius} lies outside the injectivity limit {limit}")]
    OutsideChart { radius: f64, limit: f64 },

    /// A grid configuration that the extractors cannot resolve (exact zeros, flat saddles).
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("kernel matrix factorization failed even with jitter {jitter:e}")]
    JitterExhausted { jitter: f64 },

    #[error("least-squares system stayed singular up to ridge {ridge:e}")]
    RidgeExhausted { ridge: f64 },

    #[error("{degenerate} of {trials} trials were degenerate, above the 1% budget")]
    DegeneracyBudget { degenerate: usize, trials: usize },

    #[error("antipodal pairing mismatch: {0}")]
    PairingMismatch(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
