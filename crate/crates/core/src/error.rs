use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: space has dimension {expected}, vector has {found}")]
    Dimension { expected: usize, found: usize },

    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("objective returned {value} at x = {x:?}, y = {y:?}")]
    Objective { value: f64, x: Vec<f64>, y: Vec<f64> },

    #[error("constraint ||x - y|| >= {eps} is infeasible on the unit sphere")]
    Infeasible { eps: f64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("could not parse space id `{id}`: {reason}")]
    SpaceId { id: String, reason: String },

    #[error("unknown constant `{0}`")]
    UnknownConstant(String),

    #[error("unknown theorem `{0}`")]
    UnknownTheorem(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
