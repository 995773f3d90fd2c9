use std::fmt;

use num_traits::Zero;

use super::lp::feasible_point;
use super::{same_system, AnalysisError, AnalysisResult};
use crate::matrix::Matrix;
use crate::rational::{zero, Q};
use crate::theory::{validate, Block, Outcome, Partition, Test};

/// A joint observation and the coarse-grainings giving back each marginal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityWitness {
    pub joint: Test,
    pub first: Partition,
    pub second: Partition,
}

impl CompatibilityWitness {
    /// Exact check of validity and of both marginal identities.
    pub fn verify(&self, a: &Test, b: &Test) -> bool {
        validate(&self.joint).is_valid()
            && self.joint.coarse_grain(&self.first).is_ok_and(|m| m.equivalent(a))
            && self.joint.coarse_grain(&self.second).is_ok_and(|m| m.equivalent(b))
    }
}

/// The identity a construction failed to meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionFailure {
    pub identity: String,
}

impl fmt::Display for ConstructionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.identity)
    }
}

fn check_pair(a: &Test, b: &Test) -> AnalysisResult<()> {
    for t in [a, b] {
        if !t.is_observation() {
            return Err(AnalysisError::NotObservation(t.input().clone()));
        }
    }
    same_system(a.input(), b.input())
}

/// Outcomes `x.y` in `x`-major order.
fn pair_witness(a: &Test, b: &Test, effect: impl Fn(usize, usize) -> Vec<Q>) -> CompatibilityWitness {
    let (na, nb) = (a.len(), b.len());
    let mut effects = Vec::with_capacity(na * nb);
    for (x, (ax, _)) in a.events().iter().enumerate() {
        for (y, (by, _)) in b.events().iter().enumerate() {
            effects.push((ax.join(by), effect(x, y)));
        }
    }
    let joint = Test::observation(a.input().clone(), effects).expect("pair labels are distinct");
    let first = Partition::new(
        a.outcomes()
            .enumerate()
            .map(|(x, label)| Block { label: label.clone(), members: (0..nb).map(|y| x * nb + y).collect() })
            .collect(),
    );
    let second = Partition::new(
        b.outcomes()
            .enumerate()
            .map(|(y, label)| Block { label: label.clone(), members: (0..na).map(|x| x * nb + y).collect() })
            .collect(),
    );
    CompatibilityWitness { joint, first, second }
}

/// `c_xy(j) = a_x(j) b_y(j)`.
pub fn joint_product(a: &Test, b: &Test) -> AnalysisResult<CompatibilityWitness> {
    check_pair(a, b)?;
    let w = pair_witness(a, b, |x, y| a.vector(x).iter().zip(b.vector(y)).map(|(p, q)| p * q).collect());
    assert!(w.verify(a, b), "product joint observation failed its marginals");
    Ok(w)
}

/// Assigns `items` (value, index) to bins with exact `targets`, if possible.
fn pack(items: &[(Q, usize)], targets: &[Q]) -> Option<Vec<usize>> {
    fn go(items: &[(Q, usize)], k: usize, room: &mut [Q], bins: &mut Vec<usize>) -> bool {
        if k == items.len() {
            return room.iter().all(Zero::is_zero);
        }
        let v = &items[k].0;
        if v.is_zero() {
            bins.push(0);
            if go(items, k + 1, room, bins) {
                return true;
            }
            bins.pop();
            return false;
        }
        for bin in 0..room.len() {
            if room[bin] >= *v {
                room[bin] -= v;
                bins.push(bin);
                if go(items, k + 1, room, bins) {
                    return true;
                }
                bins.pop();
                room[bin] += v;
            }
        }
        false
    }
    let mut room = targets.to_vec();
    let mut bins = Vec::new();
    go(items, 0, &mut room, &mut bins).then_some(bins)
}

/// Finds blocks of `joint` (one per outcome of `marginal`) summing to it,
/// vertex by vertex. Every joint effect must sit on a single vertex.
fn vertexwise_partition(joint: &[(usize, Q)], marginal: &Test) -> Result<Partition, ConstructionFailure> {
    let d = marginal.input().dim();
    let mut members = vec![Vec::new(); marginal.len()];
    for j in 0..d {
        let items: Vec<(Q, usize)> =
            joint.iter().enumerate().filter(|(_, (v, _))| *v == j).map(|(o, (_, w))| (w.clone(), o)).collect();
        let targets: Vec<Q> = (0..marginal.len()).map(|x| marginal.vector(x)[j].clone()).collect();
        let bins = pack(&items, &targets).ok_or_else(|| ConstructionFailure {
            identity: format!("no grouping of the joint effects on vertex {j} reproduces the marginal"),
        })?;
        for ((_, o), bin) in items.iter().zip(bins) {
            members[bin].push(*o);
        }
    }
    for m in &mut members {
        m.sort_unstable();
    }
    Ok(Partition::new(
        marginal.outcomes().zip(members).map(|(label, members)| Block { label: label.clone(), members }).collect(),
    ))
}

/// The min/max family `{r^i_j⟨j|, s^i_j⟨j|}` with `r = min(p^i_j, q^i_j)` and
/// `s = max − min`, accepted only if it is a valid observation test whose
/// effects regroup into both marginals. Missing outcomes count as zero.
pub fn joint_minmax(a: &Test, b: &Test) -> AnalysisResult<Result<CompatibilityWitness, ConstructionFailure>> {
    check_pair(a, b)?;
    let d = a.input().dim();
    let coefficient = |t: &Test, i: usize, j: usize| if i < t.len() { t.vector(i)[j].clone() } else { zero() };
    let mut effects = Vec::new();
    let mut support = Vec::new();
    for i in 0..a.len().max(b.len()) {
        for j in 0..d {
            let (p, q) = (coefficient(a, i, j), coefficient(b, i, j));
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            for (tag, w) in [("r", lo.clone()), ("s", hi - lo)] {
                let mut v = vec![zero(); d];
                v[j] = w.clone();
                let label = Outcome(vec![i.to_string(), j.to_string(), tag.to_string()]);
                effects.push((label, v));
                support.push((j, w));
            }
        }
    }
    let joint = Test::observation(a.input().clone(), effects).expect("labels are distinct");
    let report = validate(&joint);
    if !report.is_valid() {
        return Ok(Err(ConstructionFailure { identity: format!("not an observation test: {report}") }));
    }
    let first = match vertexwise_partition(&support, a) {
        Ok(p) => p,
        Err(e) => return Ok(Err(e)),
    };
    let second = match vertexwise_partition(&support, b) {
        Ok(p) => p,
        Err(e) => return Ok(Err(e)),
    };
    let w = CompatibilityWitness { joint, first, second };
    if w.verify(a, b) {
        Ok(Ok(w))
    } else {
        Ok(Err(ConstructionFailure { identity: "marginals do not match".into() }))
    }
}

/// Solves `c_xy(j) ≥ 0`, `Σ_y c_xy(j) = a_x(j)`, `Σ_x c_xy(j) = b_y(j)` exactly.
pub fn joint_lp(a: &Test, b: &Test) -> AnalysisResult<CompatibilityWitness> {
    check_pair(a, b)?;
    let (na, nb, d) = (a.len(), b.len(), a.input().dim());
    let var = |x: usize, y: usize, j: usize| (x * nb + y) * d + j;
    let n = na * nb * d;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..d {
        for x in 0..na {
            let mut row = vec![zero(); n];
            for y in 0..nb {
                row[var(x, y, j)] = Q::from_integer(1.into());
            }
            rows.push(row);
            rhs.push(a.vector(x)[j].clone());
        }
        for y in 0..nb {
            let mut row = vec![zero(); n];
            for x in 0..na {
                row[var(x, y, j)] = Q::from_integer(1.into());
            }
            rows.push(row);
            rhs.push(b.vector(y)[j].clone());
        }
    }
    let solution = feasible_point(&Matrix::from_rows(rows), &rhs).ok_or(AnalysisError::Infeasible)?;
    let w = pair_witness(a, b, |x, y| (0..d).map(|j| solution[var(x, y, j)].clone()).collect());
    assert!(w.verify(a, b), "linear-program joint observation failed its marginals");
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::system::SystemType;

    fn obs(rows: Vec<Vec<Q>>) -> Test {
        let d = rows[0].len();
        Test::observation(
            SystemType::single(d),
            rows.into_iter().enumerate().map(|(i, r)| (Outcome::atom(i.to_string()), r)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn product_of_sharp_and_fair_coin() {
        let a = obs(vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]]);
        let b = obs(vec![vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(1, 2)]]);
        let w = joint_product(&a, &b).unwrap();
        let got: Vec<&[Q]> = (0..4).map(|i| w.joint.vector(i)).collect();
        assert_eq!(got[0], &[q(1, 2), qi(0)]);
        assert_eq!(got[1], &[q(1, 2), qi(0)]);
        assert_eq!(got[2], &[qi(0), q(1, 2)]);
        assert_eq!(got[3], &[qi(0), q(1, 2)]);
    }

    #[test]
    fn trivial_pair() {
        let u = obs(vec![vec![qi(1), qi(1), qi(1)]]);
        let w = joint_product(&u, &u).unwrap();
        assert_eq!(w.joint.len(), 1);
        assert_eq!(w.joint.vector(0), &[qi(1), qi(1), qi(1)]);
    }

    #[test]
    fn minmax_on_identical_tests() {
        let a = obs(vec![vec![q(1, 3), qi(1)], vec![q(2, 3), qi(0)]]);
        let w = joint_minmax(&a, &a).unwrap().unwrap();
        assert!(w.verify(&a, &a));
    }

    #[test]
    fn minmax_on_unequal_pair_is_rejected() {
        let a = obs(vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]]);
        let b = obs(vec![vec![q(3, 4), q(1, 4)], vec![q(1, 4), q(3, 4)]]);
        // Σ_i max(p^i_j, q^i_j) = 5/4 on each vertex.
        assert!(joint_minmax(&a, &b).unwrap().is_err());
    }

    #[test]
    fn lp_on_identical_sharp_tests_is_diagonal() {
        let a = obs(vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]]);
        let w = joint_lp(&a, &a).unwrap();
        assert!(w.joint.vector(1).iter().all(Zero::is_zero));
        assert!(w.joint.vector(2).iter().all(Zero::is_zero));
    }

    #[test]
    fn mismatched_systems() {
        let a = obs(vec![vec![qi(1), qi(1)]]);
        let b = obs(vec![vec![qi(1), qi(1), qi(1)]]);
        assert!(matches!(joint_product(&a, &b), Err(AnalysisError::SystemMismatch { .. })));
    }
}
