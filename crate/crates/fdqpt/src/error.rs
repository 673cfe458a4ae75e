use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The mode is gapless (xi_k ~ 0) or the Floquet operator is at an exact
    /// quasienergy degeneracy, so the requested quantity is undefined.
    #[error("degenerate mode at k = {k}: {reason}")]
    DegenerateMode { k: f64, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-Hermitian input (defect {defect:.3e})")]
    NonHermitian { defect: f64 },

    #[error("numerical validation failed: {0} breach(es)")]
    ValidationFailed(usize),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
