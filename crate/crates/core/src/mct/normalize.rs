use super::canonical::{CanonicalForm, FlatForm};
use super::{MctError, MctResult};
use crate::lang::{typecheck, CircuitNode, TypedNode};
use crate::permutation::PermutationSpec;
use crate::system::SystemType;
use crate::theory::Test;

#[derive(Clone, Copy, PartialEq, Eq)]
enum LeafKind {
    Prep,
    Obs,
}

struct Leaf {
    kind: LeafKind,
    test: Test,
    wires: Vec<usize>,
}

/// Follows every wire through the circuit. Preparations open wires,
/// observations close them and permutations only relabel them, so the
/// residue after removing all preparations and observations is a single
/// permutation from `C′A` to `D′B`.
struct Tracer {
    dims: Vec<usize>,
    leaves: Vec<Leaf>,
}

impl Tracer {
    fn fresh(&mut self, dim: usize) -> usize {
        self.dims.push(dim);
        self.dims.len() - 1
    }

    fn trace(&mut self, node: &CircuitNode, ty: &TypedNode, inputs: Vec<usize>) -> MctResult<Vec<usize>> {
        match node {
            CircuitNode::Identity(_) => Ok(inputs),
            CircuitNode::Permutation(p) => {
                let mut out = vec![0; inputs.len()];
                for (i, &m) in p.mapping().iter().enumerate() {
                    out[m] = inputs[i];
                }
                Ok(out)
            }
            CircuitNode::Prep(t) => {
                let wires: Vec<usize> = t.output().factors().iter().map(|&d| self.fresh(d)).collect();
                self.leaves.push(Leaf { kind: LeafKind::Prep, test: t.clone(), wires: wires.clone() });
                Ok(wires)
            }
            CircuitNode::Obs(t) => {
                self.leaves.push(Leaf { kind: LeafKind::Obs, test: t.clone(), wires: inputs });
                Ok(Vec::new())
            }
            CircuitNode::Instrument(t) => {
                Err(MctError::NotAGenerator(format!("test{}->{}", t.input(), t.output())))
            }
            CircuitNode::Seq(a, b) => {
                let mid = self.trace(a, &ty.children[0], inputs)?;
                self.trace(b, &ty.children[1], mid)
            }
            CircuitNode::Par(a, b) => {
                let split = ty.children[0].input.len();
                let (left, right) = inputs.split_at(split);
                let mut out = self.trace(a, &ty.children[0], left.to_vec())?;
                out.extend(self.trace(b, &ty.children[1], right.to_vec())?);
                Ok(out)
            }
        }
    }
}

/// Rewrites a generator circuit as `(⟨a′| ⊗ Id) ∘ S ∘ (|ρ′⟩ ⊗ Id)`.
pub fn normalize_flat(node: &CircuitNode) -> MctResult<FlatForm> {
    let ty = typecheck(node)?;
    let input = ty.input.clone();
    let mut tracer = Tracer { dims: input.factors().to_vec(), leaves: Vec::new() };
    let inputs: Vec<usize> = (0..input.len()).collect();
    let outputs = tracer.trace(node, &ty, inputs.clone())?;

    let of_kind = |k: LeafKind| tracer.leaves.iter().filter(move |l| l.kind == k);
    let c_wires: Vec<usize> = of_kind(LeafKind::Prep).flat_map(|l| l.wires.iter().copied()).collect();
    let d_wires: Vec<usize> = of_kind(LeafKind::Obs).flat_map(|l| l.wires.iter().copied()).collect();
    let product = |k: LeafKind| of_kind(k).fold(Test::trivial(), |acc, l| acc.compose_par(&l.test));
    let prep = product(LeafKind::Prep);
    let obs = product(LeafKind::Obs);

    let from: Vec<usize> = c_wires.iter().chain(&inputs).copied().collect();
    let to: Vec<usize> = d_wires.iter().chain(&outputs).copied().collect();
    let mut position = vec![usize::MAX; tracer.dims.len()];
    for (k, &w) in to.iter().enumerate() {
        position[w] = k;
    }
    let mapping: Vec<usize> = from.iter().map(|&w| position[w]).collect();
    let factors = |ws: &[usize]| SystemType::new(ws.iter().map(|&w| tracer.dims[w]).collect());
    let s = PermutationSpec::new(factors(&from), mapping)
        .map_err(|e| MctError::Malformed(format!("wire bookkeeping: {e}")))?;

    // Components of x.y (all preps, then all obs) back into traversal order.
    let prep_arity = prep.arity();
    let (mut p_off, mut o_off) = (0, prep_arity);
    let mut layout = Vec::new();
    for leaf in &tracer.leaves {
        let n = leaf.test.arity();
        let off = match leaf.kind {
            LeafKind::Prep => &mut p_off,
            LeafKind::Obs => &mut o_off,
        };
        layout.extend(*off..*off + n);
        *off += n;
    }

    Ok(FlatForm { input, c_prime: factors(&c_wires), d_prime: factors(&d_wires), prep, s, obs, layout })
}

pub fn normalize(node: &CircuitNode) -> MctResult<CanonicalForm> {
    Ok(normalize_flat(node)?.to_canonical())
}
