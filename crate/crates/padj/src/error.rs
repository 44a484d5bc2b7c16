use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision exhausted in {module}: {detail}")]
    Precision { module: &'static str, detail: String },
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("not slope adapted: {0}")]
    NotAdapted(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn prec_err(module: &'static str, detail: impl Into<String>) -> Error {
    Error::Precision { module, detail: detail.into() }
}
