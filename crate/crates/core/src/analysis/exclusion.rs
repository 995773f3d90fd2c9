use std::fmt;

use super::lift::induced_observation;
use super::{same_system, AnalysisError, AnalysisResult};
use crate::lang::{evaluate, CircuitNode};
use crate::matrix::Matrix;
use crate::mct::{routings, Routing};
use crate::permutation::PermutationSpec;
use crate::rational::{one, Q};
use crate::system::SystemType;
use crate::theory::{validate, Outcome, Partition, Test};

/// A dilation `C_z : A -> B E` of `t`, the blocks `S_x` recovering `t` after
/// discarding `E`, and one postprocessing test `P^(z) : B E -> C` per `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusionWitness {
    pub ancilla: SystemType,
    pub dilation: Test,
    pub partition: Partition,
    pub postprocessing: Vec<Test>,
    /// Dilation and postprocessing use MCT generators only, so the composite
    /// test `{P^(z)_y C_z}` is an MCT test whenever `t` and the target are.
    pub within_mct: bool,
}

impl ExclusionWitness {
    /// Replays both identities exactly against `t` and `target`.
    pub fn replays(&self, t: &Test, target: &Test) -> bool {
        let b = t.output().clone();
        if self.dilation.input() != t.input() || *self.dilation.output() != b.compose(&self.ancilla) {
            return false;
        }
        if !validate(&self.dilation).is_valid() || self.postprocessing.len() != self.dilation.len() {
            return false;
        }
        let discard = Test::identity(b).compose_par(&Test::observation(
            self.ancilla.clone(),
            vec![(Outcome::empty(), vec![one(); self.ancilla.dim()])],
        )
        .expect("u is an observation test"));
        let recovered = self
            .dilation
            .compose_seq(&discard)
            .and_then(|m| m.coarse_grain(&self.partition))
            .is_ok_and(|m| m.equivalent(t));
        if !recovered {
            return false;
        }
        let mut events = Vec::with_capacity(target.len());
        for (label, _) in target.events() {
            let mut sum = Matrix::zeros(target.output().dim(), target.input().dim());
            for (p, (_, c)) in self.postprocessing.iter().zip(self.dilation.events()) {
                if !validate(p).is_valid() || p.input() != self.dilation.output() || p.output() != target.output() {
                    return false;
                }
                let Some(py) = p.find(label) else { return false };
                sum.add_assign(&py.mul(c));
            }
            events.push((label.clone(), sum));
        }
        Test::new(target.input().clone(), target.output().clone(), events).is_ok_and(|r| r.equivalent(target))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExclusionCertificate {
    /// The induced observation is informative, while every refinement of
    /// the identity is trivial.
    InformativeObservation { outcome: Outcome },
}

impl fmt::Display for ExclusionCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExclusionCertificate::InformativeObservation { outcome } => {
                write!(f, "induced effect of outcome {outcome} is not a multiple of u")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExclusionVerdict {
    Excludes(ExclusionCertificate),
    DoesNotExclude(Box<ExclusionWitness>),
    Unknown { reason: String },
}

impl ExclusionVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            ExclusionVerdict::Excludes(_) => "excludes",
            ExclusionVerdict::DoesNotExclude(_) => "does-not-exclude",
            ExclusionVerdict::Unknown { .. } => "unknown",
        }
    }
}

fn informative_outcome(t: &Test) -> Option<Outcome> {
    let a = induced_observation(t);
    a.events().iter().find(|(_, e)| e.data().iter().any(|v| *v != e.data()[0])).map(|(o, _)| o.clone())
}

/// Classical dilation: keep a copy of the input, then discard `B`.
fn copy_dilation(t: &Test) -> ExclusionWitness {
    let (a, b) = (t.input().clone(), t.output().clone());
    let (da, db) = (a.dim(), b.dim());
    let events = t
        .events()
        .iter()
        .map(|(o, m)| {
            let mut c = Matrix::zeros(db * da, da);
            for j in 0..da {
                for r in 0..db {
                    c.set(r * da + j, j, m.get(r, j).clone());
                }
            }
            (o.clone(), c)
        })
        .collect();
    let dilation = Test::new(a.clone(), b.compose(&a), events).expect("dilation types");
    let discard_b = Matrix::row(vec![one(); db]).kron(&Matrix::identity(da));
    let post = Test::new(b.compose(&a), a.clone(), vec![(Outcome::empty(), discard_b)]).expect("u ⊗ Id");
    ExclusionWitness {
        ancilla: a,
        partition: Partition::discrete(&dilation),
        postprocessing: vec![post; t.len()],
        dilation,
        within_mct: false,
    }
}

/// Under a single routing every event is `S2 (|σ_x⟩⟨u| ⊗ Id_E) S1`: keep
/// the measured `A′` on the ancilla, then discard `B′` and route back.
fn kept_input_dilation(t: &Test, r: &Routing) -> Option<ExclusionWitness> {
    let mut states = Vec::with_capacity(t.len());
    for (label, m) in t.events() {
        let core = r.extract(m)?;
        let column = core.column_vec(0);
        if (1..core.cols()).any(|j| core.column_vec(j) != column) {
            return None;
        }
        states.push((label.clone(), column));
    }
    let prep = Test::preparation(r.b_prime.clone(), states).ok()?;
    if !prep.is_deterministic() {
        return None;
    }
    let a_e = r.a_prime.compose(&r.e);
    let dilation_circuit = CircuitNode::chain([
        CircuitNode::Permutation(r.s1.clone()),
        CircuitNode::par(CircuitNode::Prep(prep), CircuitNode::Identity(a_e)),
        CircuitNode::Permutation(
            PermutationSpec::identity(r.b_prime.clone()).tensor(&PermutationSpec::block_swap(&r.a_prime, &r.e)),
        ),
        CircuitNode::par(CircuitNode::Permutation(r.s2.clone()), CircuitNode::Identity(r.a_prime.clone())),
    ])
    .expect("non-empty chain");
    let u = Test::observation(r.b_prime.clone(), vec![(Outcome::empty(), vec![one(); r.b_prime.dim()])]).ok()?;
    let post_circuit = CircuitNode::chain([
        CircuitNode::par(CircuitNode::Permutation(r.s2.invert()), CircuitNode::Identity(r.a_prime.clone())),
        CircuitNode::par(CircuitNode::Obs(u), CircuitNode::Identity(r.e.compose(&r.a_prime))),
        CircuitNode::Permutation(PermutationSpec::block_swap(&r.e, &r.a_prime)),
        CircuitNode::Permutation(r.s1.invert()),
    ])
    .expect("non-empty chain");
    let dilation = evaluate(&dilation_circuit).ok()?;
    let post = evaluate(&post_circuit).ok()?;
    Some(ExclusionWitness {
        ancilla: r.a_prime.clone(),
        partition: Partition::discrete(&dilation),
        postprocessing: vec![post; t.len()],
        dilation,
        within_mct: true,
    })
}

/// Whether `t` excludes the identity on its input. With `within_mct`
/// unset the classical copy dilation always answers.
pub fn excludes_identity(t: &Test, within_mct: bool, ancilla_cap: usize, outcome_cap: usize) -> ExclusionVerdict {
    let id = Test::identity(t.input().clone());
    if !within_mct {
        let w = copy_dilation(t);
        assert!(w.replays(t, &id), "copy dilation failed to replay");
        return ExclusionVerdict::DoesNotExclude(Box::new(w));
    }
    if let Some(outcome) = informative_outcome(t) {
        return ExclusionVerdict::Excludes(ExclusionCertificate::InformativeObservation { outcome });
    }
    if t.len() > outcome_cap {
        return ExclusionVerdict::Unknown { reason: format!("{} outcomes exceed outcome_cap = {outcome_cap}", t.len()) };
    }
    for r in routings(t.input(), t.output()) {
        if !r.a_prime.is_trivial() && r.a_prime.dim() > ancilla_cap {
            continue;
        }
        if let Some(w) = kept_input_dilation(t, &r) {
            assert!(w.replays(t, &id), "dilation witness failed to replay");
            return ExclusionVerdict::DoesNotExclude(Box::new(w));
        }
    }
    ExclusionVerdict::Unknown { reason: format!("no dilation found within ancilla_cap = {ancilla_cap}") }
}

fn constant_columns(m: &Matrix) -> Option<Vec<Q>> {
    let first = m.column_vec(0);
    (1..m.cols()).all(|j| m.column_vec(j) == first).then_some(first)
}

/// Whether `t` excludes `target`. A witness for the identity is turned
/// into one for `target` by postprocessing with `target` itself.
pub fn excludes(
    t: &Test,
    target: &Test,
    within_mct: bool,
    ancilla_cap: usize,
    outcome_cap: usize,
) -> AnalysisResult<ExclusionVerdict> {
    same_system(t.input(), target.input())?;
    let verdict = excludes_identity(t, within_mct, ancilla_cap, outcome_cap);
    if let ExclusionVerdict::DoesNotExclude(w) = &verdict {
        let postprocessing = w
            .postprocessing
            .iter()
            .map(|p| p.compose_seq(target))
            .collect::<Result<Vec<_>, _>>()?;
        let composed = ExclusionWitness { postprocessing, ..(**w).clone() };
        assert!(composed.replays(t, target), "composed witness failed to replay");
        return Ok(ExclusionVerdict::DoesNotExclude(Box::new(composed)));
    }
    let is_identity = target.len() == 1
        && target.input() == target.output()
        && *target.matrix(0) == Matrix::identity(target.input().dim());
    if is_identity {
        return Ok(verdict);
    }

    let b = t.output().clone();
    let plain = |postprocessing: Vec<Test>| ExclusionWitness {
        ancilla: SystemType::trivial(),
        dilation: t.clone(),
        partition: Partition::discrete(t),
        postprocessing,
        within_mct,
    };
    // Discard and reprepare: the target ignores its input.
    let states: Option<Vec<(Outcome, Vec<Q>)>> =
        target.events().iter().map(|(o, m)| constant_columns(m).map(|c| (o.clone(), c))).collect();
    if let Some(states) = states {
        let u = Matrix::row(vec![one(); b.dim()]);
        let events: Vec<_> = states.into_iter().map(|(o, c)| (o, Matrix::column(c).mul(&u))).collect();
        let post = Test::new(b.clone(), target.output().clone(), events)?;
        let w = plain(vec![post; t.len()]);
        if w.replays(t, target) {
            return Ok(ExclusionVerdict::DoesNotExclude(Box::new(w)));
        }
    }
    // The target is `t` itself, outcome for outcome.
    if target.output() == &b && target.same_events(t) {
        let post = (0..t.len())
            .map(|z| {
                let events = target
                    .outcomes()
                    .enumerate()
                    .map(|(y, o)| {
                        let m = if y == z { Matrix::identity(b.dim()) } else { Matrix::zeros(b.dim(), b.dim()) };
                        (o.clone(), m)
                    })
                    .collect();
                Test::new(b.clone(), b.clone(), events)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let w = plain(post);
        if w.replays(t, target) {
            return Ok(ExclusionVerdict::DoesNotExclude(Box::new(w)));
        }
    }
    let reason = match verdict {
        ExclusionVerdict::Excludes(c) => format!("identity excluded ({c}); no witness for this target"),
        ExclusionVerdict::Unknown { reason } => reason,
        ExclusionVerdict::DoesNotExclude(_) => unreachable!(),
    };
    Ok(ExclusionVerdict::Unknown { reason })
}

/// No information without disturbance: if `Σ_x T_x = Id` then every
/// induced effect is a multiple of `u`.
pub fn niwd_check(t: &Test) -> AnalysisResult<bool> {
    if t.input() != t.output() {
        return Err(AnalysisError::NotSquare { input: t.input().clone(), output: t.output().clone() });
    }
    if t.full_coarse_graining() != Matrix::identity(t.input().dim()) {
        return Ok(true);
    }
    Ok(informative_outcome(t).is_none())
}
