//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("invalid decision class: {0}")]
    InvalidClass(String),

    #[error("diversity objective requires one partition label per arm ({expected} arms, {got} labels)")]
    LabelMismatch { expected: usize, got: usize },

    #[error("oracle configuration: {0}")]
    OracleConfig(String),

    #[error("width is undefined for a class with {members} member(s)")]
    WidthUndefined { members: usize },

    #[error("brute-force oracle refused: class has {members} members (limit {limit})")]
    ClassTooLarge { members: u128, limit: u128 },

    #[error("arm index {arm} out of range for {n} arms")]
    ArmOutOfRange { arm: usize, n: usize },

    #[error("invalid run configuration: {0}")]
    InvalidRun(String),

    #[error("replay scores exhausted for arm {arm} and no fallback distribution is configured")]
    ReplayExhausted { arm: usize },

    #[error("theoretical bound undefined: expected gain minus eps2 is {denominator} (must be positive)")]
    BoundUndefined { denominator: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
