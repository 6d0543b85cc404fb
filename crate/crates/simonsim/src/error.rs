//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulator, oracle, solver and report operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Register width exceeds the configured statevector capacity.
    #[error("register width n = {n} exceeds the capacity bound n <= {max_n}")]
    CapacityExceeded { n: usize, max_n: usize },

    /// Register width of one value does not match another.
    #[error("register width mismatch: expected n = {expected}, got n = {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A measurement draw outside the half-open unit interval.
    #[error("measurement draw {draw} is outside [0, 1)")]
    InvalidDraw { draw: f64 },

    /// A value or structure failed domain validation (bad amplitude
    /// array, table shape, width, or an inconsistent constraint system).
    #[error("invalid state: {reason}")]
    InvalidState { reason: String },

    /// The hidden shift must be a nonzero n-bit value.
    #[error("hidden shift must be nonzero")]
    ZeroShift,

    /// A value does not fit in an n-bit register.
    #[error("value {value:#x} is out of range for an n = {n} bit register")]
    ValueOutOfRange { value: u64, n: usize },

    /// The function table does not satisfy the evenly-spaced collision promise.
    #[error("collision promise violated at x = {x:#x}: {reason}")]
    PromiseViolation { x: u64, reason: String },

    /// The constraint system cannot pin down a unique shift yet.
    #[error("constraint rank {rank} does not determine a unique shift (need {required})")]
    InsufficientRank { rank: usize, required: usize },

    /// Shift recovery ran out of rounds; the partial report is attached.
    #[error("round budget of {max_rounds} exhausted at rank {rank}")]
    BudgetExhausted {
        max_rounds: usize,
        rank: usize,
        report: Box<crate::pipeline::RunReport>,
    },

    /// A serialized document failed structural validation.
    #[error("malformed document: {0}")]
    MalformedDocument(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
