use alloc::string::String;
use core::fmt;

use crate::state::Violation;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid state: {0}")]
    InvalidState(Violations),

    #[error("amplitudes are not normalized (|norm - 1| = {deviation:e})")]
    NotNormalized { deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("map is not trace preserving (completeness deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("map is not completely positive (most negative Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("{quantity}: two evaluation routes disagree ({first} vs {second}, tolerance {tolerance:e})")]
    NumericalConsistency {
        quantity: &'static str,
        first: f64,
        second: f64,
        tolerance: f64,
    },

    #[error("unsupported instance: {0}")]
    Unsupported(&'static str),

    #[error("reference output state is singular beyond support handling")]
    Singular,

    #[error("discord came out negative beyond clamp tolerance ({discord:e}); optimizer misconfigured")]
    OptimizationFailure { discord: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

/// Non-empty list of violated state invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Violations(pub alloc::vec::Vec<Violation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
