//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by instance construction, policies, the runner, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An instance violates a structural invariant (empty arm list, mean out of range, ...).
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A constructor was called with parameters outside its admissible range.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// A policy or experiment configuration cannot be run as requested.
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// A ledger update arrived with a round index that does not extend the record list.
    #[error("out-of-order round: expected t = {expected}, got t = {got}")]
    OutOfOrderRound { expected: u64, got: u64 },

    /// A finite coin tape ran out of bits mid-sample.
    #[error("coin stream exhausted after {flips} flips")]
    CoinExhausted { flips: u64 },

    /// The wrapped policy broke the reduction protocol.
    #[error("reduction protocol violation: {0}")]
    Protocol(String),

    /// An episode inside a replication batch failed.
    #[error("replication {replication} failed: {source}")]
    Replication {
        replication: u64,
        #[source]
        source: Box<Error>,
    },

    /// Experiment configuration JSON could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
