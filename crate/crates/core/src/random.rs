//! Seeded samplers for systems, tests, circuits and canonical forms.
//! Entries are drawn from a bounded integer grid and normalized, so every
//! sample is exact.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{typecheck, CircuitNode, TypedNode};
use crate::matrix::Matrix;
use crate::mct::{routings, CanonicalForm};
use crate::permutation::PermutationSpec;
use crate::rational::Q;
use crate::system::SystemType;
use crate::theory::{Outcome, Test};

pub type Sampler = ChaCha8Rng;

/// Grid resolution for sampled weights.
pub const GRID: i64 = 6;

/// The generator used for case `index` of a run seeded with `seed`.
pub fn case_rng(seed: u64, index: u64) -> Sampler {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A probability vector of length `n` with denominators dividing the grid sum.
pub fn distribution<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    let mut w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=GRID)).collect();
    if w.iter().all(|&v| v == 0) {
        w[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = w.iter().sum();
    w.into_iter().map(|v| Q::new(v.into(), total.into())).collect()
}

pub fn system<R: Rng>(rng: &mut R, max_dim: usize, max_factors: usize) -> SystemType {
    let n = rng.gen_range(1..=max_factors.max(1));
    SystemType::new((0..n).map(|_| rng.gen_range(2..=max_dim.max(2))).collect())
}

fn numbered(n: usize) -> impl Iterator<Item = Outcome> {
    (0..n).map(|i| Outcome::atom(i.to_string()))
}

pub fn state<R: Rng>(rng: &mut R, s: &SystemType) -> Vec<Q> {
    distribution(rng, s.dim())
}

pub fn preparation<R: Rng>(rng: &mut R, s: &SystemType, outcomes: usize) -> Test {
    let d = s.dim();
    let w = distribution(rng, outcomes * d);
    let states = numbered(outcomes).zip(w.chunks(d)).map(|(o, c)| (o, c.to_vec())).collect();
    Test::preparation(s.clone(), states).expect("sampled preparation")
}

pub fn observation<R: Rng>(rng: &mut R, s: &SystemType, outcomes: usize) -> Test {
    let d = s.dim();
    let columns: Vec<Vec<Q>> = (0..d).map(|_| distribution(rng, outcomes)).collect();
    let effects = numbered(outcomes).enumerate().map(|(x, o)| (o, columns.iter().map(|c| c[x].clone()).collect())).collect();
    Test::observation(s.clone(), effects).expect("sampled observation")
}

/// An arbitrary classical test: each input column spreads a unit of
/// probability over `(outcome, output)` pairs.
pub fn test<R: Rng>(rng: &mut R, input: &SystemType, output: &SystemType, outcomes: usize) -> Test {
    let (di, dout) = (input.dim(), output.dim());
    let mut events = vec![Matrix::zeros(dout, di); outcomes];
    for j in 0..di {
        let w = distribution(rng, outcomes * dout);
        for (k, v) in w.into_iter().enumerate() {
            events[k / dout].set(k % dout, j, v);
        }
    }
    Test::new(input.clone(), output.clone(), numbered(outcomes).zip(events).collect()).expect("sampled test")
}

/// A deterministic event `input -> output`.
pub fn channel<R: Rng>(rng: &mut R, input: &SystemType, output: &SystemType) -> Matrix {
    test(rng, input, output, 1).matrix(0).clone()
}

/// A difference of two sampled events with the same shape.
pub fn difference<R: Rng>(rng: &mut R, input: &SystemType, output: &SystemType) -> Matrix {
    let a = test(rng, input, output, 2);
    let b = test(rng, input, output, 2);
    a.matrix(0).sub(b.matrix(1))
}

pub fn permutation<R: Rng>(rng: &mut R, s: &SystemType) -> PermutationSpec {
    let mut mapping: Vec<usize> = (0..s.len()).collect();
    mapping.shuffle(rng);
    PermutationSpec::new(s.clone(), mapping).expect("a shuffle is a bijection")
}

/// Bounds for [`circuit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitShape {
    pub max_dim: usize,
    pub max_factors: usize,
    pub max_depth: usize,
    /// Outcomes per preparation or observation leaf.
    pub max_leaf_outcomes: usize,
    /// Product of leaf outcome counts.
    pub max_outcomes: usize,
}

impl Default for CircuitShape {
    fn default() -> Self {
        Self { max_dim: 3, max_factors: 4, max_depth: 6, max_leaf_outcomes: 2, max_outcomes: 16 }
    }
}

fn leaf<R: Rng>(rng: &mut R, input: &SystemType, shape: &CircuitShape) -> CircuitNode {
    let outcomes = |rng: &mut R| rng.gen_range(1..=shape.max_leaf_outcomes);
    if input.is_trivial() {
        if rng.gen_bool(0.2) {
            return CircuitNode::Identity(SystemType::trivial());
        }
        let s = system(rng, shape.max_dim, 2.min(shape.max_factors));
        let n = outcomes(rng);
        return CircuitNode::Prep(preparation(rng, &s, n));
    }
    match rng.gen_range(0..3) {
        0 => CircuitNode::Identity(input.clone()),
        1 => CircuitNode::Permutation(permutation(rng, input)),
        _ => {
            let n = outcomes(rng);
            CircuitNode::Obs(observation(rng, input, n))
        }
    }
}

fn grow<R: Rng>(rng: &mut R, input: &SystemType, depth: usize, shape: &CircuitShape) -> (CircuitNode, SystemType) {
    if depth <= 1 || rng.gen_bool(0.25) {
        let node = leaf(rng, input, shape);
        let out = node.signature().expect("leaves are well typed").1;
        return (node, out);
    }
    if rng.gen_bool(0.5) {
        let (a, mid) = grow(rng, input, depth - 1, shape);
        let (b, out) = grow(rng, &mid, depth - 1, shape);
        (CircuitNode::seq(a, b), out)
    } else {
        let k = rng.gen_range(0..=input.len());
        let (a, left) = grow(rng, &input.slice(0, k), depth - 1, shape);
        let (b, right) = grow(rng, &input.slice(k, input.len()), depth - 1, shape);
        (CircuitNode::par(a, b), left.compose(&right))
    }
}

fn widest(ty: &TypedNode) -> usize {
    ty.children.iter().map(widest).fold(ty.input.len().max(ty.output.len()), usize::max)
}

fn outcome_count(node: &CircuitNode) -> usize {
    match node {
        CircuitNode::Prep(t) | CircuitNode::Obs(t) | CircuitNode::Instrument(t) => t.len(),
        CircuitNode::Seq(a, b) | CircuitNode::Par(a, b) => outcome_count(a) * outcome_count(b),
        _ => 1,
    }
}

/// A random well-typed generator circuit on `input` within `shape`.
pub fn circuit<R: Rng>(rng: &mut R, input: &SystemType, shape: &CircuitShape) -> CircuitNode {
    loop {
        let (node, _) = grow(rng, input, shape.max_depth, shape);
        let ty = typecheck(&node).expect("grown circuits are well typed");
        if widest(&ty) <= shape.max_factors && node.depth() <= shape.max_depth && outcome_count(&node) <= shape.max_outcomes {
            return node;
        }
    }
}

/// A random canonical form `input -> output` on a random routing, with an
/// ancilla of at most one factor.
pub fn canonical_form<R: Rng>(
    rng: &mut R,
    input: &SystemType,
    output: &SystemType,
    max_dim: usize,
    max_outcomes: usize,
) -> CanonicalForm {
    let all = routings(input, output);
    let r = all.choose(rng).expect("the empty routing always exists").clone();
    let c = if rng.gen_bool(0.5) { SystemType::trivial() } else { SystemType::single(rng.gen_range(2..=max_dim.max(2))) };
    let nx = rng.gen_range(1..=max_outcomes);
    let ny = rng.gen_range(1..=max_outcomes);
    let prep = preparation(rng, &c.compose(&r.b_prime), nx);
    let obs = observation(rng, &c.compose(&r.a_prime), ny);
    CanonicalForm::new(r.s1, r.a_prime, r.b_prime, c, r.e, prep, obs, r.s2, vec![0, 1]).expect("routing types line up")
}

/// A sub-normalized vector: a distribution scaled by a grid weight.
pub fn scaled<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    let f = Q::new(rng.gen_range(0..=GRID).into(), GRID.into());
    distribution(rng, n).into_iter().map(|v| v * &f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::evaluate;
    use crate::theory::validate;

    #[test]
    fn samples_are_valid_and_reproducible() {
        let mut rng = case_rng(7, 3);
        let s = SystemType::new(vec![2, 3]);
        assert!(validate(&preparation(&mut rng, &s, 3)).is_valid());
        assert!(validate(&observation(&mut rng, &s, 3)).is_valid());
        assert!(validate(&test(&mut rng, &s, &SystemType::single(2), 2)).is_valid());
        let a = circuit(&mut case_rng(1, 2), &s, &CircuitShape::default());
        let b = circuit(&mut case_rng(1, 2), &s, &CircuitShape::default());
        assert_eq!(a, b);
        assert!(validate(&evaluate(&a).unwrap()).is_valid());
    }

    #[test]
    fn canonical_forms_are_valid() {
        let mut rng = case_rng(11, 0);
        for _ in 0..20 {
            let cf = canonical_form(&mut rng, &SystemType::new(vec![2, 3]), &SystemType::new(vec![3, 2]), 3, 3);
            assert!(validate(&cf.semantics()).is_valid());
        }
    }
}
