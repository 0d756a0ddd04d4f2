//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by statistics construction, special-function evaluation and
/// evidence computation.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The design matrix is numerically rank deficient.
    #[error(
        "singular design: eigenvalue {eigenvalue:.6e} below {threshold:.6e} \
         (relative rank tolerance {rel_tol:.1e})"
    )]
    SingularDesign {
        eigenvalue: f64,
        threshold: f64,
        rel_tol: f64,
    },

    /// A series or quadrature failed to reach the requested accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The requested prior scheme does not support this operation.
    #[error("unsupported scheme: {0}")]
    UnsupportedScheme(String),

    /// Inconsistent inputs (length or scenario mismatches).
    #[error("mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::Mismatch(msg.into())
    }
}
