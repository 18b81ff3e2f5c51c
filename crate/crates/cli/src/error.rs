use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Table {
        path: String,
        #[source]
        source: phasekit::Error,
    },

    #[error(transparent)]
    Core(#[from] phasekit::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for usage, parse and input errors; every failure here happens
    /// before a verification verdict exists.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
