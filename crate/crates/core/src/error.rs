use thiserror::Error;

/// Errors raised by the walk, zeta, Ronkin and tropical computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid coin: {0}")]
    InvalidCoin(String),

    #[error("state error: {0}")]
    State(String),

    /// A grid determinant vanished; `k` is the offending momentum index.
    #[error("pole: det(I - uM(k)) = 0 at k = {k:?}")]
    Pole { k: Vec<usize> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy error: {message}")]
    Accuracy {
        message: String,
        nodes: usize,
        delta: f64,
        singular: bool,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid signed coordinate set: {0}")]
    InvalidSet(String),

    #[error("step cap exceeded: requested {requested}, cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable kind, used by the CLI error stream.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::InvalidCoin(_) => "invalid_coin",
            Error::State(_) => "state",
            Error::Pole { .. } => "pole",
            Error::Domain(_) => "domain",
            Error::Accuracy { .. } => "accuracy",
            Error::Degenerate(_) => "degenerate",
            Error::Unsupported(_) => "unsupported",
            Error::InvalidSet(_) => "invalid_set",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Parse(_) => "parse",
        }
    }

    pub(crate) fn accuracy(message: impl Into<String>, nodes: usize, delta: f64) -> Self {
        Error::Accuracy {
            message: message.into(),
            nodes,
            delta,
            singular: false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
