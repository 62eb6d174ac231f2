use thiserror::Error;

#[derive(Debug, Error)]
pub enum WssError {
    /// Caller passed arguments outside an operation's domain.
    #[error("usage error: {0}")]
    Usage(String),
    /// Input data is malformed (non-finite samples, wrong shape).
    #[error("data error: {0}")]
    Data(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    /// A resource guard refused the request (see `WSS_MAX_B`).
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl WssError {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        WssError::Usage(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        WssError::Data(msg.into())
    }

    pub(crate) fn config(line: usize, msg: impl Into<String>) -> Self {
        WssError::Config {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        WssError::Parse {
            pos,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, WssError>;
