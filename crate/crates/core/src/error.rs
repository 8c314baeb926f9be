use thiserror::Error;

/// Errors reported by the solvers and kernels.
#[derive(Debug, Error)]
pub enum NepError {
    #[error("evaluation at a pole ({0})")]
    Pole(String),
    #[error("argument outside the function domain ({0})")]
    Domain(String),
    #[error("matrix is singular (zero pivot at index {index})")]
    Singular { index: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("size {size} exceeds the dense limit {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("rank deficient: {0}")]
    RankDeficient(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("breakdown: {0}")]
    Breakdown(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, NepError>;
