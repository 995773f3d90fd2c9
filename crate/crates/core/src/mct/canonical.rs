use std::fmt;

use num_traits::Zero;

use super::{MctError, MctResult};
use crate::lang::{CircuitNode, CircuitSource, DeclKind, Emitter, Expr, ExprKind, Span};
use crate::matrix::Matrix;
use crate::permutation::{decompose_bipartite, PermutationSpec};
use crate::rational::Q;
use crate::system::SystemType;
use crate::theory::{Outcome, Test};

/// `T_xy = S2 ∘ (M_xy ⊗ Id_E) ∘ S1` with `M_xy = (⟨a_y|_{CA′} ⊗ Id_B′)(Id_C ⊗ swap)(|ρ_x⟩_{CB′} ⊗ Id_A′)`.
///
/// `layout` reorders the components of `x.y` into the labels reported by
/// [`CanonicalForm::semantics`]: component `k` of the reported label is
/// component `layout[k]` of `x.y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub s1: PermutationSpec,
    pub a_prime: SystemType,
    pub b_prime: SystemType,
    pub c: SystemType,
    pub e: SystemType,
    pub prep: Test,
    pub obs: Test,
    pub s2: PermutationSpec,
    pub layout: Vec<usize>,
}

/// `T_xy = (⟨a_y| ⊗ Id_B) ∘ S ∘ (|ρ_x⟩ ⊗ Id_A)` with `S : C′A -> D′B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatForm {
    pub input: SystemType,
    pub c_prime: SystemType,
    pub d_prime: SystemType,
    pub prep: Test,
    pub s: PermutationSpec,
    pub obs: Test,
    pub layout: Vec<usize>,
}

/// The routing part of a canonical form: everything but the prep and obs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub s1: PermutationSpec,
    pub s2: PermutationSpec,
    pub a_prime: SystemType,
    pub b_prime: SystemType,
    pub e: SystemType,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S1={}{} A'={} E={} B'={} S2={}{}",
            self.s1.input(),
            self.s1,
            self.a_prime,
            self.e,
            self.b_prime,
            self.s2.input(),
            self.s2
        )
    }
}

pub(crate) fn identity_layout(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn check(cond: bool, what: impl Into<String>) -> MctResult<()> {
    if cond {
        Ok(())
    } else {
        Err(MctError::Malformed(what.into()))
    }
}

impl CanonicalForm {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        s1: PermutationSpec,
        a_prime: SystemType,
        b_prime: SystemType,
        c: SystemType,
        e: SystemType,
        prep: Test,
        obs: Test,
        s2: PermutationSpec,
        layout: Vec<usize>,
    ) -> MctResult<Self> {
        let cf = Self { s1, a_prime, b_prime, c, e, prep, obs, s2, layout };
        cf.check()?;
        Ok(cf)
    }

    fn check(&self) -> MctResult<()> {
        check(self.s1.output() == self.a_prime.compose(&self.e), "S1 must end in A'E")?;
        check(self.s2.input() == &self.b_prime.compose(&self.e), "S2 must start from B'E")?;
        check(self.prep.is_preparation() && self.prep.output() == &self.c.compose(&self.b_prime), "prep must live on CB'")?;
        check(self.obs.is_observation() && self.obs.input() == &self.c.compose(&self.a_prime), "obs must live on CA'")?;
        let n = self.prep.arity() + self.obs.arity();
        let mut sorted = self.layout.clone();
        sorted.sort_unstable();
        check(sorted == identity_layout(n), "layout must permute the label components")
    }

    pub fn input(&self) -> &SystemType {
        self.s1.input()
    }

    pub fn output(&self) -> SystemType {
        self.s2.output()
    }

    pub fn signature(&self) -> Signature {
        Signature {
            s1: self.s1.clone(),
            s2: self.s2.clone(),
            a_prime: self.a_prime.clone(),
            b_prime: self.b_prime.clone(),
            e: self.e.clone(),
        }
    }

    /// `M_xy`, a `dim(B′) x dim(A′)` matrix.
    pub fn core(&self, x: usize, y: usize) -> Matrix {
        let (db, da, dc) = (self.b_prime.dim(), self.a_prime.dim(), self.c.dim());
        let rho = self.prep.matrix(x).data();
        let a = self.obs.matrix(y).data();
        let mut m = Matrix::zeros(db, da);
        for c in 0..dc {
            for b in 0..db {
                let r = &rho[c * db + b];
                if r.is_zero() {
                    continue;
                }
                for j in 0..da {
                    let v = &a[c * da + j];
                    if !v.is_zero() {
                        *m.entry_mut(b, j) += r * v;
                    }
                }
            }
        }
        m
    }

    /// Embeds a core matrix through the permutations: `S2 (M ⊗ Id_E) S1`.
    pub fn embed(&self, m: &Matrix) -> Matrix {
        embed(&self.s1, &self.s2, self.e.dim(), m)
    }

    pub fn label(&self, x: usize, y: usize) -> Outcome {
        let joined = self.prep.events()[x].0.join(&self.obs.events()[y].0);
        joined.permuted(&self.layout)
    }

    /// The test this form denotes, outcomes ordered with `x` major.
    pub fn semantics(&self) -> Test {
        let mut events = Vec::with_capacity(self.prep.len() * self.obs.len());
        for x in 0..self.prep.len() {
            for y in 0..self.obs.len() {
                events.push((self.label(x, y), self.embed(&self.core(x, y))));
            }
        }
        Test::new(self.input().clone(), self.output(), events).expect("canonical forms carry consistent types")
    }

    /// `C′ = CB′`, `D′ = CA′` and `S = (Id_CA′ ⊗ S2)(Id_C ⊗ swap(B′,A′) ⊗ Id_E)(Id_CB′ ⊗ S1)`.
    pub fn to_flat(&self) -> FlatForm {
        let c_prime = self.c.compose(&self.b_prime);
        let d_prime = self.c.compose(&self.a_prime);
        let first = PermutationSpec::identity(c_prime.clone()).tensor(&self.s1);
        let middle = PermutationSpec::identity(self.c.clone())
            .tensor(&PermutationSpec::block_swap(&self.b_prime, &self.a_prime))
            .tensor(&PermutationSpec::identity(self.e.clone()));
        let last = PermutationSpec::identity(d_prime.clone()).tensor(&self.s2);
        let s = first.then(&middle).and_then(|p| p.then(&last)).expect("canonical wiring chains");
        FlatForm {
            input: self.input().clone(),
            c_prime,
            d_prime,
            prep: self.prep.clone(),
            s,
            obs: self.obs.clone(),
            layout: self.layout.clone(),
        }
    }

    /// The circuit `perm(A,S1) ; (prep | id(A′E)) ; (id(C) | swap(B′,A′) | id(E)) ; (obs | id(B′E)) ; perm(B′E,S2)`.
    pub fn to_circuit(&self) -> CircuitNode {
        let ae = self.a_prime.compose(&self.e);
        let be = self.b_prime.compose(&self.e);
        let stages = [
            CircuitNode::Permutation(self.s1.clone()),
            CircuitNode::par(CircuitNode::Prep(self.prep.clone()), CircuitNode::Identity(ae)),
            CircuitNode::par(
                CircuitNode::par(
                    CircuitNode::Identity(self.c.clone()),
                    CircuitNode::Permutation(PermutationSpec::block_swap(&self.b_prime, &self.a_prime)),
                ),
                CircuitNode::Identity(self.e.clone()),
            ),
            CircuitNode::par(CircuitNode::Obs(self.obs.clone()), CircuitNode::Identity(be)),
            CircuitNode::Permutation(self.s2.clone()),
        ];
        CircuitNode::chain(stages).expect("five stages")
    }

    /// `.opt` source for [`CanonicalForm::to_circuit`], using `swap` for the crossing.
    pub fn to_source(&self) -> CircuitSource {
        let mut em = Emitter::new();
        let sp = Span::default();
        let node = |kind| Expr { kind, span: sp };
        let seq = |a, b| node(ExprKind::Seq(Box::new(a), Box::new(b)));
        let par = |a, b| node(ExprKind::Par(Box::new(a), Box::new(b)));
        let ae = self.a_prime.compose(&self.e);
        let be = self.b_prime.compose(&self.e);

        let s1 = em.expr(&CircuitNode::Permutation(self.s1.clone()));
        let prep = node(ExprKind::Prep(em.test(DeclKind::Prep, &self.prep)));
        let id_ae = node(ExprKind::Id(em.system(&ae)));
        let id_c = node(ExprKind::Id(em.system(&self.c)));
        let swap = node(ExprKind::Swap(em.system(&self.b_prime), em.system(&self.a_prime)));
        let id_e = node(ExprKind::Id(em.system(&self.e)));
        let obs = node(ExprKind::Obs(em.test(DeclKind::Obs, &self.obs)));
        let id_be = node(ExprKind::Id(em.system(&be)));
        let s2 = em.expr(&CircuitNode::Permutation(self.s2.clone()));

        let mut e = seq(s1, par(prep, id_ae));
        e = seq(e, par(par(id_c, swap), id_e));
        e = seq(e, par(obs, id_be));
        e = seq(e, s2);
        em.finish(Some(e))
    }

    pub fn is_ancilla_free(&self) -> bool {
        self.c.is_trivial()
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "A  = {}", self.input())?;
        writeln!(f, "S1 = {} : {} -> {}", self.s1, self.s1.input(), self.s1.output())?;
        writeln!(f, "A' = {}", self.a_prime)?;
        writeln!(f, "C  = {}", self.c)?;
        writeln!(f, "E  = {}", self.e)?;
        writeln!(f, "B' = {}", self.b_prime)?;
        writeln!(f, "S2 = {} : {} -> {}", self.s2, self.s2.input(), self.s2.output())?;
        writeln!(f, "B  = {}", self.output())?;
        write!(f, "prep outcomes = {}, obs outcomes = {}", self.prep.len(), self.obs.len())
    }
}

pub(crate) fn embed(s1: &PermutationSpec, s2: &PermutationSpec, de: usize, m: &Matrix) -> Matrix {
    let s1map = s1.index_map();
    let s2map = s2.index_map();
    let mut t = Matrix::zeros(s2map.len(), s1map.len());
    for (i, &ae) in s1map.iter().enumerate() {
        let (a, e) = (ae / de, ae % de);
        for b in 0..m.rows() {
            let v = m.get(b, a);
            if !v.is_zero() {
                t.set(s2map[b * de + e], i, v.clone());
            }
        }
    }
    t
}

impl FlatForm {
    pub fn output(&self) -> SystemType {
        let out = self.s.output();
        out.slice(self.d_prime.len(), out.len())
    }

    pub fn semantics(&self) -> Test {
        let da = self.input.dim();
        let out = self.output();
        let db = out.dim();
        let smap = self.s.index_map();
        let mut events = Vec::with_capacity(self.prep.len() * self.obs.len());
        for (ox, rho) in self.prep.events() {
            for (oy, a) in self.obs.events() {
                let mut t = Matrix::zeros(db, da);
                for (c, r) in rho.data().iter().enumerate() {
                    if r.is_zero() {
                        continue;
                    }
                    for i in 0..da {
                        let o = smap[c * da + i];
                        let (d, b) = (o / db, o % db);
                        let w = &a.data()[d];
                        if !w.is_zero() {
                            *t.entry_mut(b, i) += r * w;
                        }
                    }
                }
                events.push((ox.join(oy).permuted(&self.layout), t));
            }
        }
        Test::new(self.input.clone(), out, events).expect("flat forms carry consistent types")
    }

    /// Splits `S` at `C′ | A` and `D′ | B`, absorbing the outer sorts into the prep and obs.
    pub fn to_canonical(&self) -> CanonicalForm {
        let d = decompose_bipartite(&self.s, self.c_prime.len(), self.d_prime.len()).expect("cut within range");
        // d.a_prime: C′ -> D′ (the ancilla C), d.a_second: C′ -> B (B′),
        // d.b_prime: A -> D′ (A′), d.b_second: A -> B (E).
        let s3 = d.s3.index_map();
        let prep_events = self
            .prep
            .events()
            .iter()
            .map(|(o, m)| {
                let mut v = vec![Q::zero(); m.rows()];
                for (j, w) in m.data().iter().enumerate() {
                    v[s3[j]] = w.clone();
                }
                (o.clone(), Matrix::column(v))
            })
            .collect();
        let s4 = d.s4.index_map();
        let obs_events = self
            .obs
            .events()
            .iter()
            .map(|(o, m)| {
                let v = s4.iter().map(|&k| m.data()[k].clone()).collect();
                (o.clone(), Matrix::row(v))
            })
            .collect();
        let c = d.a_prime.clone();
        let prep = Test::new(SystemType::trivial(), c.compose(&d.a_second), prep_events).expect("reindexed prep");
        let obs = Test::new(c.compose(&d.b_prime), SystemType::trivial(), obs_events).expect("reindexed obs");
        CanonicalForm {
            s1: d.s1,
            a_prime: d.b_prime,
            b_prime: d.a_second,
            c,
            e: d.b_second,
            prep,
            obs,
            s2: d.s2,
            layout: self.layout.clone(),
        }
    }
}

/// Maps the local component indices of two composed forms into the merged
/// `x1 x2 y1 y2` label and returns the layout of `(x1 y1)(x2 y2)`.
fn merged_layout(f: &FlatForm, g: &FlatForm) -> Vec<usize> {
    let (p1, o1) = (f.prep.arity(), f.obs.arity());
    let (p2, o2) = (g.prep.arity(), g.obs.arity());
    let fl = |k: usize| if k < p1 { k } else { p1 + p2 + (k - p1) };
    let gl = |k: usize| if k < p2 { p1 + k } else { p1 + p2 + o1 + (k - p2) };
    debug_assert_eq!(f.layout.len(), p1 + o1);
    debug_assert_eq!(g.layout.len(), p2 + o2);
    f.layout.iter().map(|&k| fl(k)).chain(g.layout.iter().map(|&k| gl(k))).collect()
}

fn flat_seq(f: &FlatForm, g: &FlatForm) -> MctResult<FlatForm> {
    let b = f.output();
    if b != g.input {
        return Err(MctError::TypeMismatch { output: b, input: g.input.clone() });
    }
    let (c1, c2, d1, d2) = (&f.c_prime, &g.c_prime, &f.d_prime, &g.d_prime);
    let id = |s: &SystemType| PermutationSpec::identity(s.clone());
    let steps = [
        PermutationSpec::block_swap(c1, c2).tensor(&id(&f.input)),
        id(c2).tensor(&f.s),
        PermutationSpec::block_swap(c2, d1).tensor(&id(&b)),
        id(d1).tensor(&g.s),
    ];
    let s = steps[1..].iter().try_fold(steps[0].clone(), |acc, p| acc.then(p)).expect("sequential wiring chains");
    Ok(FlatForm {
        input: f.input.clone(),
        c_prime: c1.compose(c2),
        d_prime: d1.compose(d2),
        prep: f.prep.compose_par(&g.prep),
        s,
        obs: f.obs.compose_par(&g.obs),
        layout: merged_layout(f, g),
    })
}

fn flat_par(f: &FlatForm, g: &FlatForm) -> FlatForm {
    let (c1, c2, d1, d2) = (&f.c_prime, &g.c_prime, &f.d_prime, &g.d_prime);
    let (a1, a2) = (&f.input, &g.input);
    let (b1, b2) = (f.output(), g.output());
    let id = |s: &SystemType| PermutationSpec::identity(s.clone());
    let steps = [
        id(c1).tensor(&PermutationSpec::block_swap(c2, a1)).tensor(&id(a2)),
        f.s.tensor(&g.s),
        id(d1).tensor(&PermutationSpec::block_swap(&b1, d2)).tensor(&id(&b2)),
    ];
    let s = steps[1..].iter().try_fold(steps[0].clone(), |acc, p| acc.then(p)).expect("parallel wiring chains");
    FlatForm {
        input: a1.compose(a2),
        c_prime: c1.compose(c2),
        d_prime: d1.compose(d2),
        prep: f.prep.compose_par(&g.prep),
        s,
        obs: f.obs.compose_par(&g.obs),
        layout: merged_layout(f, g),
    }
}

/// `g ∘ f`, merging preparations and observations and fusing the permutations.
pub fn canonical_seq_compose(f: &CanonicalForm, g: &CanonicalForm) -> MctResult<CanonicalForm> {
    Ok(flat_seq(&f.to_flat(), &g.to_flat())?.to_canonical())
}

pub fn canonical_par_compose(f: &CanonicalForm, g: &CanonicalForm) -> CanonicalForm {
    flat_par(&f.to_flat(), &g.to_flat()).to_canonical()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::{q, qi};

    pub(crate) fn destroy_reprepare(d: usize, rho: Vec<Q>) -> CanonicalForm {
        let s = SystemType::single(d);
        CanonicalForm::new(
            PermutationSpec::identity(s.clone()),
            s.clone(),
            s.clone(),
            SystemType::trivial(),
            SystemType::trivial(),
            Test::preparation(s.clone(), vec![(Outcome::atom("r"), rho)]).unwrap(),
            Test::observation(s.clone(), vec![(Outcome::atom("u"), vec![qi(1); d])]).unwrap(),
            PermutationSpec::identity(s),
            vec![0, 1],
        )
        .unwrap()
    }

    pub(crate) fn identity_form(s: SystemType) -> CanonicalForm {
        CanonicalForm::new(
            PermutationSpec::identity(s.clone()),
            SystemType::trivial(),
            SystemType::trivial(),
            SystemType::trivial(),
            s.clone(),
            Test::trivial(),
            Test::trivial(),
            PermutationSpec::identity(s),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn destroy_reprepare_semantics() {
        let cf = destroy_reprepare(2, vec![q(1, 4), q(3, 4)]);
        let t = cf.semantics();
        let expected = Matrix::column(vec![q(1, 4), q(3, 4)]).mul(&Matrix::row(vec![qi(1), qi(1)]));
        assert_eq!(t.matrix(0), &expected);
    }

    #[test]
    fn identity_semantics() {
        let t = identity_form(SystemType::new(vec![2, 3])).semantics();
        assert_eq!(t.matrix(0), &Matrix::identity(6));
    }

    #[test]
    fn correlated_ancilla() {
        // ρ = Σ_c λ_c |c⟩|c⟩, a_x = ⟨x|⟨x| plus the complement.
        let two = SystemType::single(2);
        let lam = [q(1, 3), q(2, 3)];
        let rho = vec![lam[0].clone(), qi(0), qi(0), lam[1].clone()];
        let prep = Test::preparation(SystemType::new(vec![2, 2]), vec![("r".into(), rho)]).unwrap();
        let mut effects = Vec::new();
        for x in 0..2 {
            let mut v = vec![qi(0); 4];
            v[x * 2 + x] = qi(1);
            effects.push((Outcome::atom(x.to_string()), v));
        }
        effects.push(("rest".into(), vec![qi(0), qi(1), qi(1), qi(0)]));
        let obs = Test::observation(SystemType::new(vec![2, 2]), effects).unwrap();
        let cf = CanonicalForm::new(
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
        .unwrap();
        let t = cf.semantics();
        assert_eq!(t.matrix(0), &Matrix::from_rows(vec![vec![q(1, 3), qi(0)], vec![qi(0), qi(0)]]));
        assert_eq!(t.matrix(1), &Matrix::from_rows(vec![vec![qi(0), qi(0)], vec![qi(0), q(2, 3)]]));
        let total = t.full_coarse_graining();
        assert_eq!(total, Matrix::from_rows(vec![vec![q(1, 3), q(1, 3)], vec![q(2, 3), q(2, 3)]]));
    }

    #[test]
    fn flat_round_trip() {
        let cf = destroy_reprepare(3, vec![q(1, 2), q(1, 2), qi(0)]);
        let flat = cf.to_flat();
        assert!(flat.semantics().equivalent(&cf.semantics()));
        assert_eq!(flat.to_canonical(), cf);
    }

    #[test]
    fn destroy_reprepare_chain_scales() {
        let f = destroy_reprepare(2, vec![q(1, 4), q(3, 4)]);
        let g = destroy_reprepare(2, vec![q(1, 2), q(1, 2)]);
        let h = canonical_seq_compose(&f, &g).unwrap();
        let direct = f.semantics().compose_seq(&g.semantics()).unwrap();
        assert!(h.semantics().equivalent(&direct));
        assert_eq!(h.a_prime, SystemType::single(2));
        assert!(h.e.is_trivial());
    }

    #[test]
    fn tensor_with_identity_grows_e() {
        let f = destroy_reprepare(2, vec![q(1, 4), q(3, 4)]);
        let h = canonical_par_compose(&f, &identity_form(SystemType::single(3)));
        assert_eq!(h.e, SystemType::single(3));
        assert_eq!(h.prep, f.prep);
        assert!(h.semantics().equivalent(&f.semantics().compose_par(&Test::identity(SystemType::single(3)))));
    }
}
