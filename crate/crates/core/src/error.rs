use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Encoder failures are not errors; see
/// [`crate::codec::EncodeFailure`].
#[derive(Debug, Error)]
pub enum WomError {
    #[error("{what} must lie in {range}, got {value}")]
    Domain {
        what: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("length mismatch for {what}: expected {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("{what} supports at most {limit}, got {got}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("engine already fixed all {0} bits")]
    EngineExhausted(usize),

    #[error("target rate {requested} needs {needed} indices but only {available} are usable (max achievable rate {max_rate})")]
    RateUnachievable {
        requested: f64,
        needed: usize,
        available: usize,
        max_rate: f64,
    },

    #[error("invalid bit sequence: {0}")]
    BitParse(String),

    #[error("invalid set file: {0}")]
    SetFile(String),

    #[error("unsupported set file format_version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = WomError> = std::result::Result<T, E>;

impl WomError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        WomError::Io {
            path: path.into(),
            source,
        }
    }
}
