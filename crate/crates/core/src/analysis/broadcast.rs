use rayon::prelude::*;

use super::{AnalysisError, AnalysisResult};
use crate::matrix::Matrix;
use crate::mct::deterministic_form;
use crate::random::{case_rng, state};
use crate::rational::one;
use crate::system::SystemType;
use crate::theory::ClassicalEvent;

/// Both marginals of `ch : A -> AA` are the identity.
pub fn is_broadcasting(ch: &ClassicalEvent) -> AnalysisResult<bool> {
    let a = ch.input().clone();
    if *ch.output() != a.compose(&a) {
        return Err(AnalysisError::NotBroadcastShape { input: a, output: ch.output().clone() });
    }
    let d = a.dim();
    let id = Matrix::identity(d);
    let u = Matrix::row(vec![one(); d]);
    let first = id.kron(&u).mul(ch.matrix());
    let second = u.kron(&id).mul(ch.matrix());
    Ok(first == id && second == id)
}

/// The deterministic MCT channels `A -> AA`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelShape {
    /// The input passes through on the left, a fresh state is prepared on the right.
    PassLeft,
    /// A fresh state on the left, the input on the right.
    PassRight,
    /// The input is measured and discarded, a state on `AA` is prepared.
    MeasurePrepare,
}

impl ChannelShape {
    pub const ALL: [ChannelShape; 3] = [ChannelShape::PassLeft, ChannelShape::PassRight, ChannelShape::MeasurePrepare];
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BroadcastReport {
    pub dim: usize,
    pub samples: usize,
    /// Sample indices flagged as broadcasting.
    pub broadcasting: Vec<usize>,
    /// Samples that did not have an MCT deterministic form.
    pub outside_mct: Vec<usize>,
    /// The classical copy channel was flagged.
    pub copy_control: bool,
}

impl BroadcastReport {
    pub fn passed(&self) -> bool {
        self.broadcasting.is_empty() && self.outside_mct.is_empty() && self.copy_control
    }
}

/// `|j⟩ -> |j⟩|j⟩`.
pub fn copy_channel(dim: usize) -> ClassicalEvent {
    let mut m = Matrix::zeros(dim * dim, dim);
    for j in 0..dim {
        m.set(j * dim + j, j, one());
    }
    let a = SystemType::single(dim);
    ClassicalEvent::new(a.clone(), a.compose(&a), m).expect("copy channel shape")
}

pub fn sample_channel(shape: ChannelShape, dim: usize, seed: u64, index: u64) -> ClassicalEvent {
    let a = SystemType::single(dim);
    let mut rng = case_rng(seed, index);
    let id = Matrix::identity(dim);
    let m = match shape {
        ChannelShape::PassLeft => id.kron(&Matrix::column(state(&mut rng, &a))),
        ChannelShape::PassRight => Matrix::column(state(&mut rng, &a)).kron(&id),
        ChannelShape::MeasurePrepare => {
            Matrix::column(state(&mut rng, &a.compose(&a))).mul(&Matrix::row(vec![one(); dim]))
        }
    };
    ClassicalEvent::new(a.clone(), a.compose(&a), m).expect("channel shape")
}

/// Samples both structural MCT shapes and checks none broadcasts.
pub fn broadcast_sweep(dim: usize, samples: usize, seed: u64) -> AnalysisResult<BroadcastReport> {
    if dim < 2 {
        return Err(AnalysisError::DimensionTooSmall(dim));
    }
    let results: Vec<(bool, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let shape = ChannelShape::ALL[i % ChannelShape::ALL.len()];
            let ch = sample_channel(shape, dim, seed, i as u64);
            let mct = deterministic_form(&ch).is_ok_and(|f| f.is_some());
            (is_broadcasting(&ch).expect("sampled shape"), mct)
        })
        .collect();
    Ok(BroadcastReport {
        dim,
        samples,
        broadcasting: results.iter().enumerate().filter(|(_, r)| r.0).map(|(i, _)| i).collect(),
        outside_mct: results.iter().enumerate().filter(|(_, r)| !r.1).map(|(i, _)| i).collect(),
        copy_control: is_broadcasting(&copy_channel(dim))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn copy_broadcasts() {
        assert!(is_broadcasting(&copy_channel(2)).unwrap());
        assert!(is_broadcasting(&copy_channel(3)).unwrap());
    }

    #[test]
    fn fresh_state_beside_identity_does_not() {
        let ch = sample_channel(ChannelShape::PassRight, 2, 5, 0);
        assert!(!is_broadcasting(&ch).unwrap());
    }

    #[test]
    fn noisy_measure_and_prepare_does_not() {
        // Σ_j |σ_j σ_j⟩⟨j| with σ_0 = (3/4, 1/4), σ_1 = (1/4, 3/4).
        let s = [[q(3, 4), q(1, 4)], [q(1, 4), q(3, 4)]];
        let mut m = Matrix::zeros(4, 2);
        for (j, sj) in s.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    m.set(a * 2 + b, j, &sj[a] * &sj[b]);
                }
            }
        }
        let two = SystemType::single(2);
        let ch = ClassicalEvent::new(two.clone(), two.compose(&two), m).unwrap();
        assert!(!is_broadcasting(&ch).unwrap());
    }

    #[test]
    fn sweep_and_rejections() {
        let r = broadcast_sweep(2, 60, 1).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(matches!(broadcast_sweep(1, 10, 1), Err(AnalysisError::DimensionTooSmall(1))));
    }
}
