use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} needs {n} qubits, capacity is {max}")]
    Capacity { what: &'static str, n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: state has {state} qubits, spectrum has {spectrum}")]
    DimensionMismatch { state: usize, spectrum: usize },

    #[error("value {value} outside the open interval (0, 1)")]
    Domain { value: f64 },

    #[error("degenerate minimum-energy estimate ({0}); need at least 2 qubits and nonzero variance")]
    DegenerateEstimate(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cell {problem} n={n} D={d}, instance {instance}, method {method}: {source}")]
    Cell {
        problem: &'static str,
        n: usize,
        d: usize,
        instance: usize,
        method: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Missing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    /// The innermost error, looking through [`Error::Cell`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Cell { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
