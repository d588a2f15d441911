//! Crate-wide error type with stable machine-readable codes.

use thiserror::Error;

/// Errors raised by the codec, planner, simulator, and analysis kernels.
///
/// [`Error::code`] exposes the stable string identifier used on the CLI's
/// JSON error output.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
    #[error("complement bytes do not validate")]
    CheckFailed,
    #[error("no fingerprint within tolerance (best distance {best_distance})")]
    NoMatch { best_distance: f64 },
    #[error("signal database is empty")]
    EmptyDatabase,
    #[error("unknown symbol {symbol:?}{}", .index.map_or(String::new(), |i| format!(" at index {i}")))]
    UnknownSymbol { symbol: char, index: Option<usize> },
    #[error("invalid base64url length {len} (length mod 4 == 1)")]
    InvalidLength { len: usize },
    #[error("invalid base64url symbol {symbol:?} at index {index}")]
    InvalidSymbol { symbol: char, index: usize },
    #[error("url does not start with the expected prefix")]
    PrefixMismatch,
    #[error("corpus contains no symbol transitions")]
    EmptyCorpus,
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("no suitable exfiltration target in inventory")]
    NoSuitableTarget,
    #[error("invalid pulse train: {0}")]
    InvalidPulseTrain(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("invalid signal database: {0}")]
    InvalidDatabase(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

impl Error {
    /// Stable error code for machine-readable output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedFrame(_) => "MALFORMED_FRAME",
            Error::CheckFailed => "CHECK_FAILED",
            Error::NoMatch { .. } => "NO_MATCH",
            Error::EmptyDatabase => "EMPTY_DATABASE",
            Error::UnknownSymbol { .. } => "UNKNOWN_SYMBOL",
            Error::InvalidLength { .. } => "INVALID_LENGTH",
            Error::InvalidSymbol { .. } => "INVALID_SYMBOL",
            Error::PrefixMismatch => "PREFIX_MISMATCH",
            Error::EmptyCorpus => "EMPTY_CORPUS",
            Error::NotADistribution(_) => "NOT_A_DISTRIBUTION",
            Error::NoSuitableTarget => "NO_SUITABLE_TARGET",
            Error::InvalidPulseTrain(_) => "INVALID_PULSE_TRAIN",
            Error::InvalidLayout(_) => "INVALID_LAYOUT",
            Error::InvalidDatabase(_) => "INVALID_DATABASE",
            Error::InvalidModel(_) => "INVALID_MODEL",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
