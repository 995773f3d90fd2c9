use num_traits::{One, Zero};

use super::{TheoryError, TheoryResult};
use crate::matrix::Matrix;
use crate::rational::Q;
use crate::system::SystemType;

/// A transformation event `input -> output`, as a `dim(output) x dim(input)` matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalEvent {
    input: SystemType,
    output: SystemType,
    matrix: Matrix,
}

/// An event with trivial input: a column.
pub type StateVector = ClassicalEvent;
/// An event with trivial output: a row.
pub type EffectVector = ClassicalEvent;

impl ClassicalEvent {
    pub fn new(input: SystemType, output: SystemType, matrix: Matrix) -> TheoryResult<Self> {
        if matrix.shape() != (output.dim(), input.dim()) {
            return Err(TheoryError::ShapeMismatch {
                got_rows: matrix.rows(),
                got_cols: matrix.cols(),
                input,
                output,
            });
        }
        Ok(Self { input, output, matrix })
    }

    pub fn state(system: SystemType, weights: Vec<Q>) -> TheoryResult<Self> {
        Self::new(SystemType::trivial(), system, Matrix::column(weights))
    }

    pub fn effect(system: SystemType, weights: Vec<Q>) -> TheoryResult<Self> {
        Self::new(system, SystemType::trivial(), Matrix::row(weights))
    }

    pub fn identity(system: SystemType) -> Self {
        let matrix = Matrix::identity(system.dim());
        Self { input: system.clone(), output: system, matrix }
    }

    pub fn input(&self) -> &SystemType {
        &self.input
    }

    pub fn output(&self) -> &SystemType {
        &self.output
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn is_deterministic(&self) -> bool {
        self.matrix.column_sums().iter().all(One::is_one)
    }

    /// Entries of a state or effect, in index order.
    pub fn entries(&self) -> &[Q] {
        self.matrix.data()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ClassicalEvent) -> TheoryResult<ClassicalEvent> {
        if self.output != next.input {
            return Err(TheoryError::TypeMismatch { output: self.output.clone(), input: next.input.clone() });
        }
        Ok(ClassicalEvent {
            input: self.input.clone(),
            output: next.output.clone(),
            matrix: next.matrix.mul(&self.matrix),
        })
    }

    pub fn tensor(&self, other: &ClassicalEvent) -> ClassicalEvent {
        ClassicalEvent {
            input: self.input.compose(&other.input),
            output: self.output.compose(&other.output),
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    pub fn scale(&self, factor: &Q) -> ClassicalEvent {
        ClassicalEvent { input: self.input.clone(), output: self.output.clone(), matrix: self.matrix.scale(factor) }
    }

    pub fn weight(&self) -> Q {
        self.matrix.data().iter().fold(Q::zero(), |acc, v| acc + v)
    }
}

/// The unique deterministic effect `u`: the all-ones row.
pub fn deterministic_effect(system: &SystemType) -> EffectVector {
    let n = system.dim();
    ClassicalEvent {
        input: system.clone(),
        output: SystemType::trivial(),
        matrix: Matrix::row(vec![Q::one(); n]),
    }
}

/// The vertex state `|j⟩`.
pub fn vertex_state(system: &SystemType, j: usize) -> TheoryResult<StateVector> {
    let n = system.dim();
    if j >= n {
        return Err(TheoryError::IndexOutOfRange { index: j, dim: n });
    }
    let mut w = vec![Q::zero(); n];
    w[j] = Q::one();
    ClassicalEvent::state(system.clone(), w)
}

/// The vertex effect `⟨j|`.
pub fn vertex_effect(system: &SystemType, j: usize) -> TheoryResult<EffectVector> {
    let n = system.dim();
    if j >= n {
        return Err(TheoryError::IndexOutOfRange { index: j, dim: n });
    }
    let mut w = vec![Q::zero(); n];
    w[j] = Q::one();
    ClassicalEvent::effect(system.clone(), w)
}
