use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("assembly failed on triangle {triangle}: {reason}")]
    Assembly { triangle: usize, reason: String },

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("active-set iteration did not converge after {iterations} iterations (active-set sizes: {history:?})")]
    NotConverged {
        iterations: usize,
        history: Vec<usize>,
    },

    #[error("contact boundary: {0}")]
    Contact(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
