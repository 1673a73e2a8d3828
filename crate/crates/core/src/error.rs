use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid field: {0}")]
    Field(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("inconsistency: {0}")]
    Inconsistent(String),
    #[error("schema error in {artifact}: field `{field}`: {msg}")]
    Schema {
        artifact: String,
        field: String,
        msg: String,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
