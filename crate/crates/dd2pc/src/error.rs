use std::fmt;

/// Everything that can go wrong in the library, from malformed inputs to a
/// peer rejecting a verification probe.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("non-finite value produced or supplied in {0}")]
    NonFinite(&'static str),

    #[error("truncated input: needed {needed} bytes, have {got}")]
    Truncated { needed: usize, got: usize },

    #[error("unknown frame tag {0:#06x}")]
    UnknownTag(u32),

    #[error("malformed payload: {0}")]
    Malformed(String),

    #[error("unexpected frame: expected {expected}, got {got}")]
    UnexpectedFrame { expected: String, got: String },

    #[error("handshake failed: {0}")]
    Handshake(String),

    #[error("commodity server contract violated: {0}")]
    CsViolation(String),

    #[error("timed out waiting for {0}")]
    Timeout(String),

    #[error("link closed by peer")]
    Disconnected,

    #[error("peer aborted: {0}")]
    PeerAborted(String),

    #[error("verification rejected in round {round}: residual {residual:e} exceeds tolerance {tolerance:e}")]
    VerificationRejected {
        round: u32,
        residual: f64,
        tolerance: f64,
    },

    #[error("degenerate denominator at element {index}")]
    DegenerateDenominator { index: usize },

    #[error("preprocessing: {0}")]
    Preprocessing(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error once all context layers are peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidArgument(msg.to_string())
    }

    pub(crate) fn shape(op: &'static str, detail: impl fmt::Display) -> Self {
        Error::ShapeMismatch {
            op,
            detail: detail.to_string(),
        }
    }
}

pub trait ResultExt<T> {
    fn context_with<F, S>(self, f: F) -> Result<T>
    where
        F: FnOnce() -> S,
        S: Into<String>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context_with<F, S>(self, f: F) -> Result<T>
    where
        F: FnOnce() -> S,
        S: Into<String>,
    {
        self.map_err(|e| e.context(f()))
    }
}
