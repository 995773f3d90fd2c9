use std::collections::HashMap;

use super::canonical::CanonicalForm;
use super::routing::Routing;
use crate::matrix::Matrix;
use crate::rational::{one, zero, Q};
use crate::system::SystemType;
use crate::theory::{Block, Outcome, Partition, Test};

/// An ancilla-free form together with the coarse-graining that recovers the
/// original outcomes from its `(x, y)` outcomes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AncillaFree {
    pub form: CanonicalForm,
    pub partition: Partition,
}

impl AncillaFree {
    pub fn semantics(&self) -> Test {
        self.form.semantics().coarse_grain(&self.partition).expect("partition covers the expanded outcomes")
    }
}

/// A family of cores split into a product prep/obs pair: prep states on
/// `B′`, obs effects on `A′`, and the target core of each `(x, y)`.
pub(crate) struct Split {
    pub states: Vec<Vec<Q>>,
    pub effects: Vec<Vec<Q>>,
    pub assign: Vec<Vec<usize>>,
}

impl Split {
    /// Groups `x * effects.len() + y` by target core.
    pub fn groups(&self, targets: usize) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); targets];
        let ny = self.effects.len();
        for (x, row) in self.assign.iter().enumerate() {
            for (y, &k) in row.iter().enumerate() {
                groups[k].push(x * ny + y);
            }
        }
        groups
    }
}

/// Splits `cores` (each `dim B′ x dim A′`, summing to `σ ⊗ u`) into states
/// `ρ_x` and vertex-supported effects `a_y` with `Σ_{(x,y) -> k} ρ_x a_yᵀ = cores[k]`.
///
/// For each row `i` the mass `σ_i` is cut at every partial sum of
/// `cores[0..=k][i, j]` over `k`, for every column `j`. Each piece then lies
/// inside exactly one core per column. Pieces with the same core per column
/// are merged, and so are columns with the same core per piece.
pub(crate) fn split_cores(cores: &[Matrix]) -> Split {
    let (db, da) = cores[0].shape();
    let mut pieces: Vec<(Vec<usize>, Vec<Q>)> = Vec::new();
    let mut by_assignment: HashMap<Vec<usize>, usize> = HashMap::new();
    for i in 0..db {
        let cumulative: Vec<Vec<Q>> = (0..da)
            .map(|j| {
                let mut acc = zero();
                cores
                    .iter()
                    .map(|c| {
                        acc += c.get(i, j);
                        acc.clone()
                    })
                    .collect()
            })
            .collect();
        let mut cuts: Vec<Q> = cumulative.iter().flatten().cloned().collect();
        cuts.push(zero());
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            let assignment: Vec<usize> = cumulative
                .iter()
                .map(|cum| cum.iter().position(|s| s >= hi).expect("every column reaches the row mass"))
                .collect();
            let index = *by_assignment.entry(assignment.clone()).or_insert_with(|| {
                pieces.push((assignment, vec![zero(); db]));
                pieces.len() - 1
            });
            pieces[index].1[i] += hi - lo;
        }
    }

    let mut columns: Vec<(Vec<usize>, Vec<Q>)> = Vec::new();
    for j in 0..da {
        let key: Vec<usize> = pieces.iter().map(|p| p.0[j]).collect();
        match columns.iter_mut().find(|c| c.0 == key) {
            Some(c) => c.1[j] = one(),
            None => {
                let mut effect = vec![zero(); da];
                effect[j] = one();
                columns.push((key, effect));
            }
        }
    }
    let assign = (0..pieces.len()).map(|x| columns.iter().map(|c| c.0[x]).collect()).collect();
    Split {
        states: pieces.into_iter().map(|p| p.1).collect(),
        effects: columns.into_iter().map(|c| c.1).collect(),
        assign,
    }
}

fn numbered(vectors: Vec<Vec<Q>>) -> Vec<(Outcome, Vec<Q>)> {
    vectors.into_iter().enumerate().map(|(i, v)| (Outcome::atom(i.to_string()), v)).collect()
}

/// The ancilla-free form built from a split: outcomes `x.y`.
pub(crate) fn split_form(routing: &Routing, split: Split, labels: &[Outcome]) -> (CanonicalForm, Partition) {
    let partition = Partition::new(
        split
            .groups(labels.len())
            .into_iter()
            .zip(labels)
            .map(|(members, label)| Block { label: label.clone(), members })
            .collect(),
    );
    let prep = Test::preparation(routing.b_prime.clone(), numbered(split.states)).expect("pieces sum to a deterministic state");
    let obs = Test::observation(routing.a_prime.clone(), numbered(split.effects)).expect("every vertex belongs to one effect");
    let form = CanonicalForm::new(
        routing.s1.clone(),
        routing.a_prime.clone(),
        routing.b_prime.clone(),
        SystemType::trivial(),
        routing.e.clone(),
        prep,
        obs,
        routing.s2.clone(),
        vec![0, 1],
    )
    .expect("routing types line up");
    (form, partition)
}

/// Rewrites `cf` with a trivial ancilla `C`, at the cost of more outcomes.
pub fn eliminate_ancilla(cf: &CanonicalForm) -> AncillaFree {
    if cf.c.is_trivial() {
        return AncillaFree { form: cf.clone(), partition: Partition::discrete(&cf.semantics()) };
    }
    let mut cores = Vec::new();
    let mut labels = Vec::new();
    for x in 0..cf.prep.len() {
        for y in 0..cf.obs.len() {
            cores.push(cf.core(x, y));
            labels.push(cf.label(x, y));
        }
    }
    let routing = Routing {
        s1: cf.s1.clone(),
        s2: cf.s2.clone(),
        a_prime: cf.a_prime.clone(),
        b_prime: cf.b_prime.clone(),
        e: cf.e.clone(),
    };
    let (form, partition) = split_form(&routing, split_cores(&cores), &labels);
    AncillaFree { form, partition }
}

/// `Σ_k cores[k]` has equal columns; returns that column.
pub(crate) fn constant_column(cores: &[Matrix]) -> Option<Vec<Q>> {
    let mut total = Matrix::zeros(cores[0].rows(), cores[0].cols());
    for c in cores {
        total.add_assign(c);
    }
    let first = total.column_vec(0);
    (1..total.cols()).all(|j| total.column_vec(j) == first).then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mct::fixtures::{destroy_reprepare, identity_form};
    use crate::permutation::PermutationSpec;
    use crate::rational::{q, qi};

    fn correlated() -> CanonicalForm {
        let two = SystemType::single(2);
        let rho = vec![q(1, 3), qi(0), qi(0), q(2, 3)];
        let prep = Test::preparation(SystemType::new(vec![2, 2]), vec![("r".into(), rho)]).unwrap();
        let obs = Test::observation(
            SystemType::new(vec![2, 2]),
            vec![
                ("0".into(), vec![qi(1), qi(0), qi(0), qi(0)]),
                ("1".into(), vec![qi(0), qi(0), qi(0), qi(1)]),
                ("rest".into(), vec![qi(0), qi(1), qi(1), qi(0)]),
            ],
        )
        .unwrap();
        CanonicalForm::new(
            PermutationSpec::identity(two.clone()),
            two.clone(),
            two.clone(),
            two.clone(),
            SystemType::trivial(),
            prep,
            obs,
            PermutationSpec::identity(two),
            vec![0, 1],
        )
        .unwrap()
    }

    #[test]
    fn trivial_ancilla_is_kept() {
        let cf = destroy_reprepare(2, vec![q(1, 2), q(1, 2)]);
        let free = eliminate_ancilla(&cf);
        assert_eq!(free.form, cf);
        let cf = identity_form(SystemType::new(vec![2, 3]));
        assert_eq!(eliminate_ancilla(&cf).form, cf);
    }

    #[test]
    fn correlated_ancilla_is_removed() {
        let cf = correlated();
        let free = eliminate_ancilla(&cf);
        assert!(free.form.c.is_trivial());
        assert!(free.semantics().equivalent(&cf.semantics()));
        // Hand expansion: pieces 1/3 on |0⟩ and 2/3 on |1⟩, vertex effects.
        assert_eq!(free.form.prep.len(), 2);
        assert_eq!(free.form.obs.len(), 2);
        assert_eq!(free.form.prep.vector(0), &[q(1, 3), qi(0)]);
    }

    #[test]
    fn split_handles_overlapping_cuts() {
        let cores = vec![
            Matrix::from_rows(vec![vec![q(1, 4), q(1, 2)]]),
            Matrix::from_rows(vec![vec![q(3, 4), q(1, 2)]]),
        ];
        let split = split_cores(&cores);
        assert_eq!(split.states.len(), 3);
        let groups = split.groups(2);
        for (k, core) in cores.iter().enumerate() {
            let mut m = Matrix::zeros(1, 2);
            for &g in &groups[k] {
                let (x, y) = (g / split.effects.len(), g % split.effects.len());
                m.add_assign(&Matrix::column(split.states[x].clone()).mul(&Matrix::row(split.effects[y].clone())));
            }
            assert_eq!(&m, core);
        }
    }
}
