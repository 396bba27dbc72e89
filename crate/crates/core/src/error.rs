use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at entry {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inhomogeneous input: term {term} has weight {found}, expected {expected}")]
    Inhomogeneous { term: String, found: u32, expected: u32 },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("invalid json: {0}")]
    Json(String),

    #[error("{0}")]
    Usage(String),

    #[error("recursion exhausted its fuel while {0}")]
    Fuel(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
