use num_complex::Complex64;
use thiserror::Error;

/// Errors shared by every module of the toolkit.
///
/// `CertificateFailed` and `Inconclusive` are "honest" outcomes: the
/// computation ran, but the instance did not certify. Everything else is a
/// contract violation or a numerical breakdown.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value overflowed the f64 range at z = {at} (use log-domain evaluation)")]
    Overflow { at: Complex64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("certificate failed on condition `{condition}` at {witness} (slack {slack:e})")]
    CertificateFailed { condition: String, witness: String, slack: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("singular Jacobian: {0}")]
    Singular(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn inconclusive(msg: impl Into<String>) -> Self {
        Error::Inconclusive(msg.into())
    }

    /// True for outcomes that are valid answers rather than breakdowns.
    pub fn is_honest_failure(&self) -> bool {
        matches!(self, Error::CertificateFailed { .. } | Error::Inconclusive(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
