use thiserror::Error;

use crate::info::CapacityCertificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A row of a channel matrix is not a probability vector.
    #[error("row {row} is not stochastic (deviation {deviation:.3e})")]
    NotStochastic { row: usize, deviation: f64 },

    #[error("invalid shape: {0}")]
    WrongShape(String),

    /// A combinatorial object would exceed the configured size limit.
    #[error("problem too large: {size} exceeds limit {limit}")]
    TooLarge { size: u128, limit: u128 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("residual not zero after greedy extraction (max entry {0:.3e})")]
    ResidualNotZero(f64),

    #[error("Blahut-Arimoto did not converge in {iterations} iterations (gap {:.3e})", best.gap)]
    MaxIterExceeded {
        iterations: usize,
        best: Box<CapacityCertificate>,
    },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("verification failed for {item}: observed {observed}, expected {expected}")]
    VerificationFailed {
        item: String,
        observed: String,
        expected: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Whether the error stems from the caller's input rather than from a computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NotStochastic { .. }
                | Error::WrongShape(_)
                | Error::InvalidInput(_)
                | Error::DomainError(_)
        )
    }
}
