use thiserror::Error;

/// Failure modes shared by every experiment in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An average, table or range has nothing to work on.
    #[error("empty domain: {0}")]
    EmptyDomain(String),

    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The request does not fit the integer width or the configured limits.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The prime window `[h0, h]` holds too few primes to average over.
    #[error("degenerate prime window [{h0}, {h}]: {reason}")]
    DegenerateWindow { h0: f64, h: f64, reason: String },

    /// A function preset name that the parser does not know.
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
