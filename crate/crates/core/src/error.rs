use alloc::string::String;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Inputs violate a precondition (bad sizes, non-positive tolerances, grids out of range).
    #[error("configuration error: {0}")]
    Config(String),

    /// A builder received an eigenvalue outside the closed right half-plane.
    #[error("eigenvalue {value} lies outside the closed right half-plane")]
    Spectrum { value: Complex64 },

    /// `λI - A` is singular, i.e. `λ` is (numerically) an eigenvalue.
    #[error("resolvent undefined at lambda = {lambda}")]
    ResolventUndefined { lambda: Complex64 },

    /// Quadrature or iteration did not reach its tolerance within the hard cap.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("fit error: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }
}
