use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The input violates a defining condition (symplecticity, positivity,
    /// taming) by more than the tolerance.
    #[error("{what}: violation {violation:.3e} exceeds tolerance {tolerance:.1e}")]
    Domain {
        what: String,
        violation: f64,
        tolerance: f64,
    },

    #[error("singular denominator ({what}) at {at}")]
    Pole { what: String, at: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown symbol `{symbol}` at line {line}, column {column}")]
    UnknownSymbol {
        symbol: String,
        line: usize,
        column: usize,
    },

    #[error("model `{model}` is invalid at {at}: {message}")]
    ModelInvalid {
        model: String,
        at: String,
        message: String,
    },

    #[error("unknown {kind} `{name}`")]
    NotFound { kind: &'static str, name: String },

    #[error("numerical instability: {0}")]
    Instability(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(what: impl Into<String>, violation: f64, tolerance: f64) -> Self {
        Error::Domain {
            what: what.into(),
            violation,
            tolerance,
        }
    }
}
