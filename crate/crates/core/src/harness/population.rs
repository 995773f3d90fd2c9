use rand::seq::SliceRandom;
use rand::Rng;

use crate::lang::CircuitNode;
use crate::matrix::Matrix;
use crate::mct::{routings, CanonicalForm};
use crate::permutation::PermutationSpec;
use crate::random::{self, case_rng, CircuitShape};
use crate::rational::one;
use crate::system::SystemType;
use crate::theory::{Outcome, Test};

pub fn circuit_shape(max_dim: usize, max_factors: usize) -> CircuitShape {
    CircuitShape { max_dim, max_factors, ..CircuitShape::default() }
}

/// `{|j⟩⟨j|}` on a single factor of dimension `d`.
pub fn sharp_test(d: usize) -> Test {
    let s = SystemType::single(d);
    let events = (0..d)
        .map(|j| {
            let mut m = Matrix::zeros(d, d);
            m.set(j, j, one());
            (Outcome::atom(j.to_string()), m)
        })
        .collect();
    Test::new(s.clone(), s, events).expect("sharp test")
}

fn deterministic_observation(s: &SystemType) -> Test {
    Test::observation(s.clone(), vec![(Outcome::atom("u"), vec![one(); s.dim()])]).expect("u")
}

/// A generator circuit `A -> A`, cycling through three families: a random
/// circuit closed off by discard-and-prepare, a random canonical form, and
/// an identity routing with a correlated ancilla.
pub fn atomicity_population(seed: u64, index: usize, max_dim: usize, max_factors: usize) -> CircuitNode {
    let mut rng = case_rng(seed, index as u64);
    let a = random::system(&mut rng, max_dim, max_factors);
    match index % 3 {
        0 => {
            let c = random::circuit(&mut rng, &a, &circuit_shape(max_dim, max_factors));
            let (_, out) = c.signature().expect("sampled circuits are well typed");
            if out == a {
                return c;
            }
            let n = rng.gen_range(1..=2);
            let back = CircuitNode::seq(
                CircuitNode::Obs(deterministic_observation(&out)),
                CircuitNode::Prep(random::preparation(&mut rng, &a, n)),
            );
            CircuitNode::seq(c, back)
        }
        1 => random::canonical_form(&mut rng, &a, &a, max_dim, 3).to_circuit(),
        _ => {
            let c = SystemType::single(rng.gen_range(2..=max_dim.max(2)));
            let (nx, ny) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let prep = random::preparation(&mut rng, &c, nx);
            let obs = random::observation(&mut rng, &c, ny);
            let id = PermutationSpec::identity(a.clone());
            let t = SystemType::trivial();
            CanonicalForm::new(id.clone(), t.clone(), t, c, a, prep, obs, id, vec![0, 1])
                .expect("identity routing")
                .to_circuit()
        }
    }
}

/// A test that does not exclude the identity, as an ancilla-free form with
/// a deterministic observation, and a random MCT target on the same input.
pub fn exclusion_population(seed: u64, index: usize, max_dim: usize, max_factors: usize) -> (CanonicalForm, Test) {
    let mut rng = case_rng(seed, index as u64);
    let a = random::system(&mut rng, max_dim, max_factors);
    let (b, r) = if index % 2 == 0 {
        (a.clone(), routings(&a, &a).swap_remove(0))
    } else {
        let b = random::system(&mut rng, max_dim, max_factors);
        let r = routings(&a, &b).choose(&mut rng).expect("the empty routing always exists").clone();
        (b, r)
    };
    debug_assert_eq!(r.s2.output(), b);
    let nx = rng.gen_range(1..=3);
    let prep = random::preparation(&mut rng, &r.b_prime, nx);
    let obs = deterministic_observation(&r.a_prime);
    let cf = CanonicalForm::new(r.s1, r.a_prime, r.b_prime, SystemType::trivial(), r.e, prep, obs, r.s2, vec![0, 1])
        .expect("routing types line up");
    let target_out = random::system(&mut rng, max_dim, max_factors.min(2));
    let target = random::canonical_form(&mut rng, &a, &target_out, max_dim, 3).semantics();
    (cf, target)
}
