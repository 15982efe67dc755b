use thiserror::Error;

/// Errors surfaced by every module of the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Text input could not be parsed; `token` names the offending piece.
    #[error("parse error at `{token}`: {message}")]
    Parse { token: String, message: String },

    /// The elimination workspace or an enumeration budget would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// The requested model/degree combination is not supported.
    #[error("unsupported: {0}")]
    Capability(String),

    /// An oracle was asked about an input outside its domain of validity.
    #[error("oracle inapplicable: {0}")]
    OracleInapplicable(String),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn parse(token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
