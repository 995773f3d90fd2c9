//! Verdicts built on the core: compatibility, exclusion, NIWD,
//! broadcasting and the operational norm.

mod broadcast;
mod compat;
mod exclusion;
mod lift;
pub mod lp;
mod norm;

pub use broadcast::{broadcast_sweep, copy_channel, is_broadcasting, sample_channel, BroadcastReport, ChannelShape};
pub use compat::{joint_lp, joint_minmax, joint_product, CompatibilityWitness, ConstructionFailure};
pub use exclusion::{excludes, excludes_identity, niwd_check, ExclusionCertificate, ExclusionVerdict, ExclusionWitness};
pub use lift::{induced_observation, lift_observation};
pub use norm::{op_distance, op_norm};

use crate::mct::MctError;
use crate::system::SystemType;
use crate::theory::TheoryError;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("system mismatch: {left} vs {right}")]
    SystemMismatch { left: SystemType, right: SystemType },
    #[error("expected an observation test on {0}")]
    NotObservation(SystemType),
    #[error("expected a deterministic state")]
    NotDeterministic,
    #[error("expected a test from a system to itself, got {input} -> {output}")]
    NotSquare { input: SystemType, output: SystemType },
    #[error("expected a channel {input} -> {input}{input}, got output {output}")]
    NotBroadcastShape { input: SystemType, output: SystemType },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("dimension {0} is too small")]
    DimensionTooSmall(usize),
    #[error("linear program reported infeasible on a valid pair")]
    Infeasible,
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Mct(#[from] MctError),
}

pub type AnalysisResult<T> = Result<T, AnalysisError>;

fn same_system(left: &SystemType, right: &SystemType) -> AnalysisResult<()> {
    if left == right {
        Ok(())
    } else {
        Err(AnalysisError::SystemMismatch { left: left.clone(), right: right.clone() })
    }
}
