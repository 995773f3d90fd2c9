//! Linear semantics of causal classical theories.
//!
//! A system of dimension `d` is a `d`-vertex simplex. Events are
//! entrywise non-negative, column-substochastic matrices; tests are
//! outcome-labelled families of events whose sum is column-stochastic.

mod event;
mod outcome;
mod validity;

pub use event::{deterministic_effect, vertex_effect, vertex_state, ClassicalEvent, EffectVector, StateVector};
pub use outcome::Outcome;
pub use test::{format_distribution, probability, Block, Partition, Test};
pub use validity::{validate, TestKind, ValidityReport, Violation};

use thiserror::Error;

use crate::system::SystemType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("cannot compose: output system {output} does not match input system {input}")]
    TypeMismatch { output: SystemType, input: SystemType },
    #[error("matrix shape {got_rows}x{got_cols} does not fit {input} -> {output}")]
    ShapeMismatch { input: SystemType, output: SystemType, got_rows: usize, got_cols: usize },
    #[error("a test needs at least one outcome")]
    EmptyTest,
    #[error("duplicate outcome label {0}")]
    DuplicateOutcome(String),
    #[error("outcome labels of one test must all have the same number of components")]
    MixedArity,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("vertex index {index} out of range for a system of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("expected a deterministic {0}")]
    NotDeterministic(&'static str),
}

pub type TheoryResult<T> = Result<T, TheoryError>;
