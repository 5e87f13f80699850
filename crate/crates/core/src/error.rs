use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A measure-zero input where the map is undefined (zero coordinate,
    /// point on the cube boundary).
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters rejected before any sampling starts.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient data: obtained {obtained} samples, need at least {required}")]
    InsufficientData { obtained: usize, required: usize },

    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
