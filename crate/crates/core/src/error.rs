use thiserror::Error;

/// Errors raised by the library.
///
/// `Validation` covers bad arguments detected before any work is done;
/// the remaining variants are failures discovered while computing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Validation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("singular basis: determinant is zero")]
    SingularBasis,
    #[error("rule inconsistency: {0}")]
    RuleInconsistency(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by bad input rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::SingularBasis)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
