use std::fmt;

use num_traits::{One, Signed};

use super::{Outcome, Test};
use crate::rational::{format_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestKind {
    Preparation,
    Observation,
    Transformation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NegativeEntry { outcome: Outcome, row: usize, col: usize, value: Q },
    ColumnSumExceedsOne { outcome: Outcome, col: usize, sum: Q },
    EffectEntryAboveOne { outcome: Outcome, index: usize, value: Q },
    NotDeterministic { col: usize, sum: Q },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeEntry { outcome, row, col, value } => {
                write!(f, "outcome {outcome}: negative entry {} at ({row},{col})", format_q(value))
            }
            Violation::ColumnSumExceedsOne { outcome, col, sum } => {
                write!(f, "outcome {outcome}: column {col} sums to {} > 1", format_q(sum))
            }
            Violation::EffectEntryAboveOne { outcome, index, value } => {
                write!(f, "outcome {outcome}: effect entry {} > 1 at index {index}", format_q(value))
            }
            Violation::NotDeterministic { col, sum } => {
                write!(f, "full coarse-graining column {col} sums to {} instead of 1", format_q(sum))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub kind: TestKind,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid {:?} test", self.kind);
        }
        write!(f, "invalid {:?} test:", self.kind)?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Reports every violated invariant of `t`; never fails.
pub fn validate(t: &Test) -> ValidityReport {
    let kind = if t.is_preparation() && !t.is_observation() {
        TestKind::Preparation
    } else if t.is_observation() && !t.is_preparation() {
        TestKind::Observation
    } else {
        TestKind::Transformation
    };
    let mut violations = Vec::new();
    for (outcome, m) in t.events() {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let v = m.get(r, c);
                if v.is_negative() {
                    violations.push(Violation::NegativeEntry { outcome: outcome.clone(), row: r, col: c, value: v.clone() });
                } else if kind == TestKind::Observation && *v > Q::one() {
                    violations.push(Violation::EffectEntryAboveOne { outcome: outcome.clone(), index: c, value: v.clone() });
                }
            }
        }
        if kind != TestKind::Observation {
            for (c, s) in m.column_sums().into_iter().enumerate() {
                if s > Q::one() {
                    violations.push(Violation::ColumnSumExceedsOne { outcome: outcome.clone(), col: c, sum: s });
                }
            }
        }
    }
    for (c, s) in t.full_coarse_graining().column_sums().into_iter().enumerate() {
        if !s.is_one() {
            violations.push(Violation::NotDeterministic { col: c, sum: s });
        }
    }
    ValidityReport { kind, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::system::SystemType;

    #[test]
    fn sharp_observation_is_valid() {
        let t = Test::observation(
            SystemType::single(2),
            vec![("0".into(), vec![qi(1), qi(0)]), ("1".into(), vec![qi(0), qi(1)])],
        )
        .unwrap();
        let r = validate(&t);
        assert!(r.is_valid());
        assert_eq!(r.kind, TestKind::Observation);
    }

    #[test]
    fn incomplete_observation_is_reported() {
        let t = Test::observation(SystemType::single(2), vec![("0".into(), vec![qi(1), qi(0)])]).unwrap();
        let r = validate(&t);
        assert_eq!(r.violations, vec![Violation::NotDeterministic { col: 1, sum: qi(0) }]);
    }

    #[test]
    fn effect_range_is_reported() {
        let t = Test::observation(SystemType::single(2), vec![("0".into(), vec![q(3, 2), qi(1)])]).unwrap();
        let r = validate(&t);
        assert!(r.violations.contains(&Violation::EffectEntryAboveOne { outcome: "0".into(), index: 0, value: q(3, 2) }));
    }

    #[test]
    fn negative_entries_and_overfull_columns() {
        let t = Test::preparation(SystemType::single(2), vec![("x".into(), vec![qi(2), qi(-1)])]).unwrap();
        let r = validate(&t);
        assert_eq!(r.kind, TestKind::Preparation);
        assert!(matches!(r.violations[0], Violation::NegativeEntry { row: 1, col: 0, .. }));
        assert!(r.violations.iter().all(|v| !matches!(v, Violation::NotDeterministic { .. })));
    }
}
