use super::{AnalysisError, AnalysisResult};
use crate::matrix::Matrix;
use crate::system::SystemType;
use crate::theory::{ClassicalEvent, Test};

/// The measure-and-prepare test `T_x = |ρ⟩⟨a_x|`.
pub fn lift_observation(a: &Test, rho: &ClassicalEvent) -> AnalysisResult<Test> {
    if !a.is_observation() {
        return Err(AnalysisError::NotObservation(a.input().clone()));
    }
    if !rho.input().is_trivial() || !rho.is_deterministic() {
        return Err(AnalysisError::NotDeterministic);
    }
    let events = a.events().iter().map(|(o, effect)| (o.clone(), rho.matrix().mul(effect))).collect();
    Ok(Test::new(a.input().clone(), rho.output().clone(), events)?)
}

/// `a_x = u ∘ T_x`.
pub fn induced_observation(t: &Test) -> Test {
    let events = t.events().iter().map(|(o, m)| (o.clone(), Matrix::row(m.column_sums()))).collect();
    Test::new(t.input().clone(), SystemType::trivial(), events).expect("labels carry over")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;
    use crate::theory::vertex_state;

    #[test]
    fn sharp_lift_and_round_trip() {
        let s = SystemType::single(2);
        let a = Test::observation(s.clone(), vec![("0".into(), vec![qi(1), qi(0)]), ("1".into(), vec![qi(0), qi(1)])])
            .unwrap();
        let t = lift_observation(&a, &vertex_state(&s, 0).unwrap()).unwrap();
        assert_eq!(t.matrix(0), &Matrix::from_rows(vec![vec![qi(1), qi(0)], vec![qi(0), qi(0)]]));
        assert_eq!(t.matrix(1), &Matrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]));
        assert!(induced_observation(&t).same_events(&a));
    }

    #[test]
    fn identity_induces_u() {
        let u = induced_observation(&Test::identity(SystemType::single(3)));
        assert_eq!(u.vector(0), &[qi(1), qi(1), qi(1)]);
    }
}
