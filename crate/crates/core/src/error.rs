use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation (bad dimension,
    /// unknown segment label, index out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical precondition failed beyond tolerance (non-unitary
    /// operator, non-positive density operator, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A function table could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
