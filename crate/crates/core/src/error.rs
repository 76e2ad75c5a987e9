use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("replica-symmetric matrix (m={m}, rho={rho}, q={q}) is not positive definite")]
    SingularMatrix { m: usize, rho: f64, q: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Gaussian draw numerically rank-deficient after {0} attempts")]
    DegenerateDraw(usize),

    #[error("unsupported moment pattern: {0}")]
    UnsupportedPattern(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("fixed-point iteration did not converge after {0} iterations")]
    NonConvergence(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("exact assignment limited to n <= {limit}, got {n}")]
    SizeLimit { n: usize, limit: usize },

    #[error("source does not provide a mean vector")]
    MissingMean,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}
