//! Factor routings: which input factors pass untouched to which output
//! factors, with the rest measured (`A′`) or freshly prepared (`B′`).

use crate::matrix::Matrix;
use crate::permutation::PermutationSpec;
use crate::system::SystemType;

use super::canonical::embed;

/// `S1 : A -> A′E` and `S2 : B′E -> B`. `A′` and `B′` keep ascending slot
/// order; `E` follows the output slots it lands on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Routing {
    pub s1: PermutationSpec,
    pub s2: PermutationSpec,
    pub a_prime: SystemType,
    pub b_prime: SystemType,
    pub e: SystemType,
}

impl Routing {
    /// `pairs[k] = (input slot, output slot)` of the `k`-th pass-through factor,
    /// sorted by output slot.
    fn build(input: &SystemType, output: &SystemType, pairs: &[(usize, usize)]) -> Routing {
        let passed_in: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let passed_out: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let a_slots: Vec<usize> = (0..input.len()).filter(|i| !passed_in.contains(i)).collect();
        let b_slots: Vec<usize> = (0..output.len()).filter(|o| !passed_out.contains(o)).collect();

        let mut m1 = vec![0; input.len()];
        for (k, &i) in a_slots.iter().chain(&passed_in).enumerate() {
            m1[i] = k;
        }
        let m2: Vec<usize> = b_slots.iter().chain(&passed_out).copied().collect();
        let e = output.select(&passed_out);
        let b_prime = output.select(&b_slots);
        Routing {
            s1: PermutationSpec::new(input.clone(), m1).expect("routing slots form a bijection"),
            s2: PermutationSpec::new(b_prime.compose(&e), m2).expect("routing slots form a bijection"),
            a_prime: input.select(&a_slots),
            b_prime,
            e,
        }
    }

    /// The core `M` with `T = S2 (M ⊗ Id_E) S1`, if `T` has that shape.
    pub fn extract(&self, t: &Matrix) -> Option<Matrix> {
        let de = self.e.dim();
        let (da, db) = (self.a_prime.dim(), self.b_prime.dim());
        let s1inv = self.s1.invert().index_map();
        let s2map = self.s2.index_map();
        let mut m = Matrix::zeros(db, da);
        for a in 0..da {
            for b in 0..db {
                m.set(b, a, t.get(s2map[b * de], s1inv[a * de]).clone());
            }
        }
        (embed(&self.s1, &self.s2, de, &m) == *t).then_some(m)
    }
}

/// All routings from `input` to `output`, largest pass-through first, then
/// in lexicographic order of the (input, output) slot pairs.
pub fn routings(input: &SystemType, output: &SystemType) -> Vec<Routing> {
    let mut found: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![false; output.len()];
    collect(input, output, 0, &mut used, &mut current, &mut found);
    found.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    found
        .into_iter()
        .map(|mut pairs| {
            pairs.sort_by_key(|p| p.1);
            Routing::build(input, output, &pairs)
        })
        .collect()
}

fn collect(
    input: &SystemType,
    output: &SystemType,
    slot: usize,
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    found: &mut Vec<Vec<(usize, usize)>>,
) {
    if slot == input.len() {
        found.push(current.clone());
        return;
    }
    for o in 0..output.len() {
        if !used[o] && output.factors()[o] == input.factors()[slot] {
            used[o] = true;
            current.push((slot, o));
            collect(input, output, slot + 1, used, current, found);
            current.pop();
            used[o] = false;
        }
    }
    collect(input, output, slot + 1, used, current, found);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn counts_and_order() {
        let s = SystemType::new(vec![2, 2]);
        let r = routings(&s, &s);
        // {} + 4 single pairs + 2 full bijections.
        assert_eq!(r.len(), 7);
        assert_eq!(r[0].e, s);
        assert!(r[0].s1.is_identity() && r[0].s2.is_identity());
        assert!(r.last().unwrap().e.is_trivial());
    }

    #[test]
    fn extract_identity_and_swap() {
        let s = SystemType::new(vec![2, 3]);
        let r = routings(&s, &s);
        assert_eq!(r[0].extract(&Matrix::identity(6)), Some(Matrix::from_rows(vec![vec![qi(1)]])));
        let swap = PermutationSpec::block_swap(&SystemType::single(2), &SystemType::single(2));
        let s2 = SystemType::new(vec![2, 2]);
        let rs = routings(&s2, &s2);
        assert!(rs[0].extract(&swap.matrix()).is_none());
        let hit = rs.iter().find(|r| r.extract(&swap.matrix()).is_some()).unwrap();
        assert_eq!(hit.e, s2);
        assert_eq!(hit.s1, swap);
    }
}
