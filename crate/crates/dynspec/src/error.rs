//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must agree in dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A configuration violates its invariants.
    #[error("config error: {0}")]
    Config(String),

    /// A run would exceed the configured pull budget.
    #[error("pull budget exceeded: need {needed} pulls, budget is {budget}")]
    Budget { needed: u64, budget: u64 },

    /// A reward buffer or fixture is missing expected data.
    #[error("data error: {0}")]
    Data(String),

    /// A numerical routine failed to converge or lost its invariants.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
