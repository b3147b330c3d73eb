use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    Spec(String),
    #[error("unknown {kind} `{name}`; valid names: {valid}")]
    Lookup {
        kind: &'static str,
        name: String,
        valid: String,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("window index {index} outside [1, {len}]")]
    Boundary { index: i64, len: usize },
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("degenerate variance: long-run variance estimate {0} is not positive")]
    DegenerateVariance(f64),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn numeric<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Numeric(msg.into()))
}
