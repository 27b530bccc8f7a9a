//! Error type shared by the parsing, build, query, and serialization layers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CtrError {
    #[error("line {line}: malformed token `{token}`")]
    MalformedLine { line: usize, token: String },
    #[error("line {line}: timestamps are not non-decreasing")]
    NonMonotoneTimestamps { line: usize },
    #[error("line {line}: trip has fewer than 2 nodes")]
    TripTooShort { line: usize },
    #[error("timestamp {timestamp} out of range for the configured discretizer")]
    TimestampOutOfRange { timestamp: u64 },
    #[error("node id {node} out of range 1..={sigma_s}")]
    NodeOutOfRange { node: u64, sigma_s: u64 },
    #[error("dataset contains no trips")]
    EmptyDataset,
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("time window [{t1},{t2}] invalid for sigma_t={sigma_t}")]
    WindowInvalid { t1: u64, t2: u64, sigma_t: u64 },
    #[error("aligned time sequence length {got} does not match n={expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("network model invalid: {0}")]
    ModelInvalid(String),
    #[error("unsupported benchmark configuration: {0}")]
    ConfigurationUnsupported(String),
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("index file corrupt: {0}")]
    Format(String),
    #[error("index file checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CtrError>;
