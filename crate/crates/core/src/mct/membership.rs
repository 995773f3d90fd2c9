use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::ancilla::{constant_column, split_cores, split_form};
use super::canonical::CanonicalForm;
use super::routing::{routings, Routing};
use super::{MctError, MctResult};
use crate::matrix::Matrix;
use crate::permutation::PermutationSpec;
use crate::rational::{zero, Q};
use crate::system::SystemType;
use crate::theory::{validate, ClassicalEvent, Outcome, Partition, Test};

/// A canonical form plus the coarse-graining that turns its semantics into
/// the queried test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub form: CanonicalForm,
    pub partition: Partition,
    /// Index of the routing in [`routings`] order.
    pub routing: usize,
}

impl Witness {
    pub fn semantics(&self) -> Test {
        self.form.semantics().coarse_grain(&self.partition).expect("witness partitions cover the form outcomes")
    }

    pub fn replays(&self, t: &Test) -> bool {
        self.semantics().equivalent(t)
    }

    fn is_one_to_one(&self) -> bool {
        self.partition.blocks().iter().all(|b| b.members.len() == 1)
    }

    fn rank(&self) -> (bool, usize, usize) {
        (!self.is_one_to_one(), self.form.c.dim(), self.routing)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Not a valid test to begin with.
    Invalid(String),
    /// The events refine the identity but `event` is not a multiple of it.
    Atomicity { event: usize, label: Outcome },
    /// No factor routing writes every event as `S2 (M ⊗ Id_E) S1` with
    /// `Σ M` a destroy-and-reprepare core.
    NoAdmissibleRouting { routings: usize },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Invalid(why) => write!(f, "invalid test: {why}"),
            Certificate::Atomicity { label, .. } => {
                write!(f, "full coarse-graining is the identity but event {label} is not proportional to it")
            }
            Certificate::NoAdmissibleRouting { routings } => {
                write!(f, "none of the {routings} factor routings yields a canonical form")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipVerdict {
    InMct(Box<Witness>),
    NotInMct(Certificate),
    Unknown { reason: String },
}

impl MembershipVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            MembershipVerdict::InMct(_) => "in-mct",
            MembershipVerdict::NotInMct(_) => "not-in-mct",
            MembershipVerdict::Unknown { .. } => "unknown",
        }
    }
}

/// The weights `p_x` when every event is `p_x · Id` and they sum to `Id`.
pub fn is_atomic_identity_refinement(t: &Test) -> Option<Vec<Q>> {
    if t.input() != t.output() || t.full_coarse_graining() != Matrix::identity(t.input().dim()) {
        return None;
    }
    let id = Matrix::identity(t.input().dim());
    t.events().iter().map(|(_, m)| m.proportionality_to(&id)).collect()
}

fn atomicity_violation(t: &Test) -> Option<Certificate> {
    if t.input() != t.output() || t.full_coarse_graining() != Matrix::identity(t.input().dim()) {
        return None;
    }
    let id = Matrix::identity(t.input().dim());
    let event = t.events().iter().position(|(_, m)| m.proportionality_to(&id).is_none())?;
    Some(Certificate::Atomicity { event, label: t.events()[event].0.clone() })
}

fn copy_register(routing: &Routing, cores: &[Matrix], sigma: &[Q], t: &Test) -> (CanonicalForm, Partition) {
    let (db, da) = cores[0].shape();
    let c = routing.b_prime.clone();
    let mut rho = vec![zero(); db * db];
    for i in 0..db {
        rho[i * db + i] = sigma[i].clone();
    }
    let effects = cores
        .iter()
        .enumerate()
        .map(|(k, core)| {
            let mut d = vec![zero(); db * da];
            for i in 0..db {
                for j in 0..da {
                    d[i * da + j] = if sigma[i].is_zero() {
                        if k == 0 { Q::one() } else { zero() }
                    } else {
                        core.get(i, j) / &sigma[i]
                    };
                }
            }
            (t.events()[k].0.clone(), d)
        })
        .collect();
    let prep = Test::preparation(c.compose(&routing.b_prime), vec![(Outcome::empty(), rho)]).expect("σ is a distribution");
    let obs = Test::observation(c.compose(&routing.a_prime), effects).expect("rows of the cores sum to σ");
    let form = CanonicalForm::new(
        routing.s1.clone(),
        routing.a_prime.clone(),
        routing.b_prime.clone(),
        c,
        routing.e.clone(),
        prep,
        obs,
        routing.s2.clone(),
        (0..t.arity()).collect(),
    )
    .expect("routing types line up");
    (form, Partition::discrete(t))
}

fn candidates(index: usize, routing: &Routing, t: &Test) -> Option<Vec<Witness>> {
    let cores: Vec<Matrix> = t.events().iter().map(|(_, m)| routing.extract(m)).collect::<Option<_>>()?;
    let sigma = constant_column(&cores)?;
    let labels: Vec<Outcome> = t.outcomes().cloned().collect();
    let (form, partition) = split_form(routing, split_cores(&cores), &labels);
    let mut found = vec![Witness { form, partition, routing: index }];
    if !routing.b_prime.is_trivial() {
        let (form, partition) = copy_register(routing, &cores, &sigma, t);
        found.push(Witness { form, partition, routing: index });
    }
    Some(found)
}

/// Decides whether `t` is obtainable from MCT generators, with witnesses
/// limited to `dim C ≤ ancilla_cap` and at most `outcome_cap` prep and obs
/// outcomes. A trivial ancilla is always allowed.
pub fn membership(t: &Test, ancilla_cap: usize, outcome_cap: usize) -> MembershipVerdict {
    let report = validate(t);
    if !report.is_valid() {
        return MembershipVerdict::NotInMct(Certificate::Invalid(report.to_string()));
    }
    if let Some(cert) = atomicity_violation(t) {
        return MembershipVerdict::NotInMct(cert);
    }
    let all = routings(t.input(), t.output());
    let per_routing: Vec<Option<Vec<Witness>>> =
        all.par_iter().enumerate().map(|(i, r)| candidates(i, r, t)).collect();
    if per_routing.iter().all(Option::is_none) {
        return MembershipVerdict::NotInMct(Certificate::NoAdmissibleRouting { routings: all.len() });
    }
    let within = |w: &Witness| {
        (w.form.c.is_trivial() || w.form.c.dim() <= ancilla_cap)
            && w.form.prep.len() <= outcome_cap
            && w.form.obs.len() <= outcome_cap
    };
    let best = per_routing.into_iter().flatten().flatten().filter(within).min_by_key(Witness::rank);
    match best {
        Some(w) => {
            assert!(w.replays(t), "membership witness failed to replay");
            MembershipVerdict::InMct(Box::new(w))
        }
        None => MembershipVerdict::Unknown {
            reason: format!("every witness exceeds ancilla_cap = {ancilla_cap} or outcome_cap = {outcome_cap}"),
        },
    }
}

/// Default caps: `dim(A) · dim(B)` and 16.
pub fn default_caps(t: &Test) -> (usize, usize) {
    (t.input().dim() * t.output().dim(), 16)
}

/// `T = S2 ∘ (|ρ⟩⟨u|_{A′→B′} ⊗ Id_E) ∘ S1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicForm {
    pub s1: PermutationSpec,
    pub s2: PermutationSpec,
    pub a_prime: SystemType,
    pub b_prime: SystemType,
    pub e: SystemType,
    pub rho: Vec<Q>,
}

impl DeterministicForm {
    pub fn to_canonical(&self) -> CanonicalForm {
        let prep = Test::preparation(self.b_prime.clone(), vec![(Outcome::empty(), self.rho.clone())])
            .expect("ρ is deterministic");
        let obs = Test::observation(self.a_prime.clone(), vec![(Outcome::empty(), vec![Q::one(); self.a_prime.dim()])])
            .expect("u is deterministic");
        CanonicalForm::new(
            self.s1.clone(),
            self.a_prime.clone(),
            self.b_prime.clone(),
            SystemType::trivial(),
            self.e.clone(),
            prep,
            obs,
            self.s2.clone(),
            Vec::new(),
        )
        .expect("routing types line up")
    }

    pub fn matrix(&self) -> Matrix {
        let core = Matrix::column(self.rho.clone()).mul(&Matrix::row(vec![Q::one(); self.a_prime.dim()]));
        super::canonical::embed(&self.s1, &self.s2, self.e.dim(), &core)
    }
}

/// The first routing under which the deterministic `t` discards what it
/// does not pass through and reprepares a fixed state.
pub fn deterministic_form(t: &ClassicalEvent) -> MctResult<Option<DeterministicForm>> {
    if !t.is_deterministic() {
        return Err(MctError::NotDeterministic);
    }
    for r in routings(t.input(), t.output()) {
        let Some(m) = r.extract(t.matrix()) else { continue };
        let Some(rho) = constant_column(std::slice::from_ref(&m)) else { continue };
        let form = DeterministicForm { s1: r.s1, s2: r.s2, a_prime: r.a_prime, b_prime: r.b_prime, e: r.e, rho };
        debug_assert_eq!(&form.matrix(), t.matrix());
        return Ok(Some(form));
    }
    Ok(None)
}
