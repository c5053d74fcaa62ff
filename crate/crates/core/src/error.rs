//! Crate-wide error type for model, inference, training and analysis code.
//!
//! File-format errors live in [`crate::ingest::IngestError`] and are wrapped
//! here so library callers can bubble everything through one type.

use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameter validation failed; carries every violated invariant.
    #[error("invalid parameters: {}", format_violations(.0))]
    InvalidParams(Vec<Violation>),

    /// A matrix handed to a normalizer contained a negative entry.
    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    /// The observation sequence has probability exactly zero under the
    /// parameters; `step` is the 0-based round at which the mass vanished.
    #[error("sequence {game_id:?} has zero probability at step {step}")]
    ZeroProbability { game_id: String, step: usize },

    /// An outcome index does not fit the model's emission alphabet.
    #[error("sequence {game_id:?}, outcome {index}: symbol {value} outside alphabet of size {alphabet}")]
    OutcomeOutOfRange {
        game_id: String,
        index: usize,
        value: usize,
        alphabet: usize,
    },

    /// The scaling vector passed to `backward` does not match the sequence.
    #[error("scale vector of length {actual} does not match sequence length {expected}")]
    ScaleMismatch { expected: usize, actual: usize },

    #[error("no sequences supplied")]
    EmptySequences,

    #[error("invalid training config: {0}")]
    InvalidConfig(String),

    /// Every restart of a training run failed; one line per restart.
    #[error("all {} restarts failed:\n{}", .0.len(), .0.join("\n"))]
    AllRestartsFailed(Vec<String>),

    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: String,
        expected: String,
        actual: String,
    },

    #[error("unknown player {0:?}")]
    UnknownPlayer(String),

    /// Two objects that must share a roster do not.
    #[error("roster mismatch: {0}")]
    RosterMismatch(String),

    /// `empirical_initial` saw no observed rounds at all.
    #[error("organizer counts are all zero; no rounds observed")]
    ZeroCounts,

    #[error("percentage {0} outside [0, 1]")]
    PctOutOfRange(f64),

    #[error("invalid figure subject: {0}")]
    InvalidSubject(String),

    #[error("empty length range: {min}..={max}")]
    EmptyLengthRange { min: usize, max: usize },

    #[error("sequence length must be at least 1")]
    EmptyLength,

    /// Path enumeration would exceed the brute-force guard of 1e7 paths.
    #[error("enumeration guard exceeded: {states} states over {steps} steps")]
    EnumerationGuard { states: usize, steps: usize },

    /// Total likelihood of zero during brute-force posterior accumulation.
    #[error("total likelihood is zero; posteriors undefined")]
    ZeroLikelihood,

    #[error(transparent)]
    Ingest(#[from] crate::ingest::IngestError),
}

pub type Result<T> = std::result::Result<T, Error>;

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
