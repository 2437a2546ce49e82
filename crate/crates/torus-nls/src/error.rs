//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A lattice enumeration would exceed the configured iteration cap.
    #[error("enumeration budget exceeded: needs {needed} iterations, cap is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    /// A non-finite value appeared mid-evolution.
    #[error("blow-up detected at step {step} (t = {t}): non-finite field value")]
    BlowUp { step: usize, t: f64 },

    /// Physical-sample array does not match the grid.
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: [usize; 3],
        got: [usize; 3],
    },

    /// Plan file could not be found.
    #[error("plan file not found: {0}")]
    PlanNotFound(PathBuf),

    /// Plan failed validation.
    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    /// Malformed checkpoint file.
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, emitted in the CLI's JSON error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::BlowUp { .. } => "blow_up",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::PlanNotFound(_) => "plan_not_found",
            Error::InvalidPlan(_) => "plan_invalid",
            Error::BadCheckpoint(_) => "bad_checkpoint",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}
