use thiserror::Error;

/// Errors produced by the simulator, the optimizers and the command line.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported size: {qubits} qubits exceeds the limit of {limit} for {what}")]
    UnsupportedSize {
        what: &'static str,
        qubits: usize,
        limit: usize,
    },

    #[error("no neutral axis: every Pauli axis appears in some Hamiltonian term")]
    NoNeutralAxis,

    #[error("evaluation of offspring {offspring} failed: {source}")]
    Evaluation {
        offspring: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed run log: {0}")]
    Log(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit status for the command line, grouped by category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::NoNeutralAxis => 2,
            Error::Io(_) | Error::Json(_) | Error::Log(_) => 3,
            Error::UnsupportedSize { .. } => 4,
            Error::Evaluation { source, .. } => source.exit_code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
