use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular matrix")]
    Singular,

    #[error("eigendecomposition failed to converge after {iterations} QR sweeps")]
    EigenNoConvergence { iterations: usize },

    #[error(
        "ill-conditioned diagonalisation of rung {rung}: eigenvector condition number {condition:.3e} exceeds {limit:.1e} (near an exceptional point)"
    )]
    IllConditioned { rung: usize, condition: f64, limit: f64 },

    #[error("integration failed at t = {t} ps: {reason}")]
    Integration { t: f64, reason: String },

    #[error("fit did not converge: {0}")]
    NotConverged(String),

    #[error("target unreachable: {0}")]
    Unreachable(String),
}

impl Error {
    /// Whether the error is caused by the caller's input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_) | Error::InvalidGrid(_) | Error::Dimension(_) | Error::Unreachable(_)
        )
    }
}
