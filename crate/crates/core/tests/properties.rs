//! Randomized invariants across the library. Each property draws a seed
//! and builds its inputs with the crate's exact samplers.

use num_traits::One;
use proptest::prelude::*;
use rand::Rng;

use optmct::analysis::{
    excludes, excludes_identity, induced_observation, is_broadcasting, joint_lp, joint_product, lift_observation,
    op_norm, sample_channel, ChannelShape, ExclusionVerdict,
};
use optmct::harness::{circuit_shape, exclusion_population};
use optmct::lang::{evaluate, parse, CircuitNode, CircuitSource};
use optmct::matrix::Matrix;
use optmct::mct::{
    canonical_par_compose, canonical_seq_compose, deterministic_form, eliminate_ancilla, membership, normalize,
    MembershipVerdict,
};
use optmct::random::{self, case_rng, Sampler};
use optmct::system::SystemType;
use optmct::theory::{validate, ClassicalEvent, Partition, Test};

fn rng(seed: u64) -> Sampler {
    case_rng(seed, 0)
}

fn sys(r: &mut Sampler, max_factors: usize) -> SystemType {
    random::system(r, 3, max_factors)
}

fn outcomes(r: &mut Sampler) -> usize {
    r.gen_range(1..=3)
}

fn u_row(s: &SystemType) -> Matrix {
    Matrix::row(vec![One::one(); s.dim()])
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    // ---------------------------------------------------------------- theory

    #[test]
    fn compositions_are_valid(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let (a, b, c) = (sys(r, 2), sys(r, 2), sys(r, 2));
        let (n1, n2) = (outcomes(r), outcomes(r));
        let s = random::test(r, &a, &b, n1);
        let t = random::test(r, &b, &c, n2);
        prop_assert!(validate(&s.compose_seq(&t).unwrap()).is_valid());
        prop_assert!(validate(&s.compose_par(&t)).is_valid());
    }

    #[test]
    fn compositions_are_associative(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let [a, b, c, d] = [(); 4].map(|_| sys(r, 2));
        let s = random::test(r, &a, &b, 2);
        let t = random::test(r, &b, &c, 2);
        let v = random::test(r, &c, &d, 2);
        let left = s.compose_seq(&t).unwrap().compose_seq(&v).unwrap();
        let right = s.compose_seq(&t.compose_seq(&v).unwrap()).unwrap();
        prop_assert!(left.equivalent(&right));
        let left = s.compose_par(&t).compose_par(&v);
        let right = s.compose_par(&t.compose_par(&v));
        prop_assert!(left.equivalent(&right));
    }

    #[test]
    fn interchange_law(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let [a, b, c, d, e, f] = [(); 6].map(|_| sys(r, 1));
        let p = random::test(r, &a, &b, 2);
        let q = random::test(r, &c, &d, 2);
        let s = random::test(r, &b, &e, 2);
        let t = random::test(r, &d, &f, 2);
        let lhs = p.compose_par(&q).compose_seq(&s.compose_par(&t)).unwrap();
        let rhs = p.compose_seq(&s).unwrap().compose_par(&q.compose_seq(&t).unwrap());
        // Same events, outcome tuples in a different order.
        for (label, m) in lhs.events() {
            let c = label.components();
            let swapped = optmct::theory::Outcome(vec![c[0].clone(), c[2].clone(), c[1].clone(), c[3].clone()]);
            prop_assert_eq!(rhs.find(&swapped), Some(m));
        }
    }

    #[test]
    fn discarding_the_output_is_causal(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let (a, b) = (sys(r, 2), sys(r, 2));
        let n = outcomes(r);
        let t = random::test(r, &a, &b, n);
        prop_assert_eq!(u_row(&b).mul(&t.full_coarse_graining()), u_row(&a));
    }

    // ---------------------------------------------------------------- lang

    #[test]
    fn evaluation_ignores_reassociation(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let shape = circuit_shape(2, 2);
        let a = sys(r, 2);
        let x = random::circuit(r, &a, &shape);
        let b = x.signature().unwrap().1;
        let y = random::circuit(r, &b, &shape);
        let c = y.signature().unwrap().1;
        let z = random::circuit(r, &c, &shape);
        let left = evaluate(&CircuitNode::seq(CircuitNode::seq(x.clone(), y.clone()), z.clone())).unwrap();
        let right = evaluate(&CircuitNode::seq(x.clone(), CircuitNode::seq(y.clone(), z.clone()))).unwrap();
        prop_assert!(left.equivalent(&right));
        let left = evaluate(&CircuitNode::par(CircuitNode::par(x.clone(), y.clone()), z.clone())).unwrap();
        let right = evaluate(&CircuitNode::par(x, CircuitNode::par(y, z))).unwrap();
        prop_assert!(left.equivalent(&right));
    }

    #[test]
    fn evaluation_commutes_with_coarse_graining(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let (a, b) = (sys(r, 2), sys(r, 2));
        let (nm, nr) = (r.gen_range(2..=4), outcomes(r));
        let m = random::observation(r, &a, nm);
        let rho = random::preparation(r, &b, nr);
        let cut = r.gen_range(1..nm);
        let merge = Partition::from_groups(vec![(0..cut).collect(), (cut..nm).collect()]);
        let coarse_first = evaluate(&CircuitNode::seq(
            CircuitNode::Obs(m.coarse_grain(&merge).unwrap()),
            CircuitNode::Prep(rho.clone()),
        ))
        .unwrap();
        let t = evaluate(&CircuitNode::seq(CircuitNode::Obs(m), CircuitNode::Prep(rho))).unwrap();
        let lifted = Partition::from_groups(
            [(0..cut), (cut..nm)]
                .into_iter()
                .flat_map(|xs| (0..nr).map(move |y| xs.clone().map(|x| x * nr + y).collect()))
                .collect(),
        );
        prop_assert!(t.coarse_grain(&lifted).unwrap().same_events(&coarse_first));
    }

    #[test]
    fn evaluated_circuits_are_valid_and_print_back(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let a = sys(r, 3);
        let node = random::circuit(r, &a, &circuit_shape(3, 3));
        let t = evaluate(&node).unwrap();
        prop_assert!(validate(&t).is_valid());
        let text = CircuitSource::from_circuit(&node).to_string();
        let again = parse(&text).unwrap().to_circuit().unwrap();
        prop_assert!(evaluate(&again).unwrap().same_events(&t));
    }

    // ---------------------------------------------------------------- mct

    #[test]
    fn normalization_is_sound(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let a = sys(r, 3);
        let node = random::circuit(r, &a, &circuit_shape(3, 3));
        let cf = normalize(&node).unwrap();
        prop_assert!(cf.semantics().equivalent(&evaluate(&node).unwrap()));
        // The emitted source normalizes to the same shape.
        let again = parse(&cf.to_source().to_string()).unwrap().to_circuit().unwrap();
        prop_assert_eq!(normalize(&again).unwrap().signature(), cf.signature());
    }

    #[test]
    fn full_coarse_graining_has_deterministic_form(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let a = sys(r, 3);
        let node = random::circuit(r, &a, &circuit_shape(3, 3));
        let t = normalize(&node).unwrap().semantics();
        let det = ClassicalEvent::new(t.input().clone(), t.output().clone(), t.full_coarse_graining()).unwrap();
        let form = deterministic_form(&det).unwrap();
        prop_assert!(form.is_some_and(|f| f.matrix() == *det.matrix()));
    }

    #[test]
    fn canonical_composition_is_closed(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let [a, b, c] = [(); 3].map(|_| sys(r, 2));
        let f = random::canonical_form(r, &a, &b, 3, 2);
        let g = random::canonical_form(r, &b, &c, 3, 2);
        let fg = canonical_seq_compose(&f, &g).unwrap();
        prop_assert!(fg.semantics().equivalent(&f.semantics().compose_seq(&g.semantics()).unwrap()));
        let fc = canonical_par_compose(&f, &g);
        prop_assert!(fc.semantics().equivalent(&f.semantics().compose_par(&g.semantics())));
    }

    #[test]
    fn canonical_composition_is_associative(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let [a, b, c, d] = [(); 4].map(|_| sys(r, 1));
        let f = random::canonical_form(r, &a, &b, 3, 2);
        let g = random::canonical_form(r, &b, &c, 3, 2);
        let h = random::canonical_form(r, &c, &d, 3, 2);
        let left = canonical_seq_compose(&canonical_seq_compose(&f, &g).unwrap(), &h).unwrap();
        let right = canonical_seq_compose(&f, &canonical_seq_compose(&g, &h).unwrap()).unwrap();
        prop_assert!(left.semantics().equivalent(&right.semantics()));
    }

    #[test]
    fn ancilla_elimination_preserves_semantics(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let (a, b) = (sys(r, 2), sys(r, 2));
        let cf = random::canonical_form(r, &a, &b, 3, 3);
        let free = eliminate_ancilla(&cf);
        prop_assert!(free.form.c.is_trivial());
        prop_assert!(free.semantics().equivalent(&cf.semantics()));
    }

    #[test]
    fn canonical_semantics_are_members(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let (a, b) = (sys(r, 2), sys(r, 2));
        let t = random::canonical_form(r, &a, &b, 3, 2).semantics();
        match membership(&t, a.dim() * b.dim(), 16) {
            MembershipVerdict::InMct(w) => prop_assert!(w.replays(&t)),
            MembershipVerdict::Unknown { .. } => {}
            MembershipVerdict::NotInMct(c) => prop_assert!(false, "rejected: {}", c),
        }
    }

    // ---------------------------------------------------------------- analysis

    #[test]
    fn joint_observations_verify(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let s = random::system(r, 4, 1);
        let (na, nb) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let a = random::observation(r, &s, na);
        let b = random::observation(r, &s, nb);
        prop_assert!(joint_product(&a, &b).unwrap().verify(&a, &b));
        prop_assert!(joint_lp(&a, &b).unwrap().verify(&a, &b));
    }

    #[test]
    fn lifting_then_inducing_is_the_identity(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let (a, b) = (sys(r, 2), sys(r, 2));
        let n = r.gen_range(1..=4);
        let obs = random::observation(r, &a, n);
        let rho = ClassicalEvent::state(b.clone(), random::state(r, &b)).unwrap();
        prop_assert!(induced_observation(&lift_observation(&obs, &rho).unwrap()).equivalent(&obs));
    }

    #[test]
    fn exclusion_witnesses_compose(seed in any::<u64>(), index in 0usize..1000) {
        let (cf, target) = exclusion_population(seed, index, 3, 2);
        let t = cf.semantics();
        let ExclusionVerdict::DoesNotExclude(_) = excludes_identity(&t, true, 64, 16) else {
            return Err(TestCaseError::fail("identity excluded"));
        };
        let ExclusionVerdict::DoesNotExclude(w) = excludes(&t, &target, true, 64, 16).unwrap() else {
            return Err(TestCaseError::fail("target excluded"));
        };
        prop_assert!(w.replays(&t, &target));
    }

    #[test]
    fn mct_channels_do_not_broadcast(seed in any::<u64>(), dim in 2usize..=4, shape in 0usize..3) {
        let ch = sample_channel(ChannelShape::ALL[shape], dim, seed, 0);
        prop_assert!(!is_broadcasting(&ch).unwrap());
        prop_assert!(deterministic_form(&ch).unwrap().is_some());
    }

    #[test]
    fn operational_norm_is_a_monotone_norm(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let [a0, a, b, b1] = [(); 4].map(|_| sys(r, 2));
        let d1 = random::difference(r, &a, &b);
        let d2 = random::difference(r, &a, &b);
        prop_assert!(op_norm(&d1.add(&d2)) <= op_norm(&d1) + op_norm(&d2));
        let pre = random::channel(r, &a0, &a);
        let post = random::channel(r, &b, &b1);
        prop_assert!(op_norm(&post.mul(&d1).mul(&pre)) <= op_norm(&d1));
        let scaled = d1.scale(&optmct::rational::q(-3, 2));
        prop_assert_eq!(op_norm(&scaled), op_norm(&d1) * optmct::rational::q(3, 2));
    }
}

#[test]
fn sharp_test_is_not_in_mct_but_is_classical() {
    let src = parse("system A = [2]\ntest t : A -> A { 0 = [[1,0],[0,0]], 1 = [[0,0],[0,1]] }\n").unwrap();
    let t: Test = src.test("t").unwrap();
    assert!(matches!(membership(&t, 4, 16), MembershipVerdict::NotInMct(_)));
    assert!(matches!(excludes_identity(&t, false, 4, 16), ExclusionVerdict::DoesNotExclude(_)));
    assert!(matches!(excludes_identity(&t, true, 4, 16), ExclusionVerdict::Excludes(_)));
}
