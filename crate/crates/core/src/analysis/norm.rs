use super::{AnalysisError, AnalysisResult};
use crate::matrix::Matrix;
use crate::rational::Q;
use crate::theory::ClassicalEvent;

/// The largest column ℓ1 norm of `delta`: the best bias with which a
/// single use separates the two events it is the difference of.
pub fn op_norm(delta: &Matrix) -> Q {
    delta.max_column_l1()
}

pub fn op_distance(a: &ClassicalEvent, b: &ClassicalEvent) -> AnalysisResult<Q> {
    if a.matrix().shape() != b.matrix().shape() {
        return Err(AnalysisError::ShapeMismatch { left: a.matrix().shape(), right: b.matrix().shape() });
    }
    Ok(op_norm(&a.matrix().sub(b.matrix())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn constant_channels_are_maximally_apart() {
        let u = Matrix::row(vec![qi(1), qi(1)]);
        let d = Matrix::column(vec![qi(1), qi(0)]).mul(&u).sub(&Matrix::column(vec![qi(0), qi(1)]).mul(&u));
        assert_eq!(op_norm(&d), qi(2));
        assert_eq!(op_norm(&Matrix::zeros(2, 2)), qi(0));
    }
}
