//! Crate-wide error and result types.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("computation failed: {0}")]
    Computation(String),

    /// A change rate with an empty "after" set; the caller decides exclusion.
    #[error("undefined rate: {0}")]
    UndefinedRate(String),

    /// A regressor is collinear with the absorbed fixed effects.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Logistic fit diverged, usually complete separation on the named predictor.
    #[error("separation detected on predictor '{0}' (coefficient diverged)")]
    Separation(String),

    #[error("incomplete artifacts: {0}")]
    IncompleteArtifacts(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn computation(msg: impl Into<String>) -> Self {
        Error::Computation(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
