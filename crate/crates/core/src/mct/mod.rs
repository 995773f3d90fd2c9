//! The minimal classical theory: canonical forms of generator circuits and
//! the decisions built on them.

mod ancilla;
mod canonical;
mod membership;
mod normalize;
mod routing;
mod stabilize;

pub use ancilla::{eliminate_ancilla, AncillaFree};
pub use canonical::{canonical_par_compose, canonical_seq_compose, CanonicalForm, FlatForm, Signature};
pub use membership::{
    default_caps, deterministic_form, is_atomic_identity_refinement, membership, Certificate, DeterministicForm,
    MembershipVerdict, Witness,
};
pub use normalize::{normalize, normalize_flat};
pub use routing::{routings, Routing};
pub use stabilize::{stabilize_subsequence, Stabilized};

use crate::lang::TypeError;
use crate::system::SystemType;
use crate::theory::TheoryError;

#[derive(Debug, thiserror::Error)]
pub enum MctError {
    #[error("not an MCT generator: {0}")]
    NotAGenerator(String),
    #[error("malformed canonical form: {0}")]
    Malformed(String),
    #[error("cannot compose: output {output} does not match input {input}")]
    TypeMismatch { output: SystemType, input: SystemType },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("event is not deterministic")]
    NotDeterministic,
    #[error("empty sequence")]
    EmptySequence,
}

pub type MctResult<T> = Result<T, MctError>;

#[cfg(test)]
pub(crate) use canonical::tests as fixtures;
