use thiserror::Error;

/// Errors produced by the walk library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("invalid index: {0}")]
    Index(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("coin state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("spin mismatch: expected 2j = {expected}, found 2j = {found}")]
    SpinMismatch { expected: i32, found: i32 },
    #[error("degenerate parameter rho = {0}; need 0 < rho < 1")]
    Degenerate(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, WalkError>;
