use itertools::Itertools;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use super::population::{atomicity_population, circuit_shape, exclusion_population, sharp_test};
use super::{circuit_source, source_of, CaseResult, SuiteConfig, SuiteName};
use crate::analysis::{
    broadcast_sweep, excludes, excludes_identity, induced_observation, joint_lp, joint_minmax, joint_product,
    lift_observation, niwd_check, op_norm, sample_channel, ChannelShape, CompatibilityWitness, ExclusionVerdict,
};
use crate::lang::{evaluate, CircuitNode};
use crate::matrix::Matrix;
use crate::mct::{
    canonical_par_compose, canonical_seq_compose, default_caps, membership, normalize as normal_form, Certificate,
    MembershipVerdict,
};
use crate::permutation::{decompose_bipartite, PermutationSpec};
use crate::random::{self, case_rng};
use crate::rational::{sum, Q};
use crate::system::SystemType;
use crate::theory::{ClassicalEvent, Test};

fn caps(config: &SuiteConfig, t: &Test) -> (usize, usize) {
    (config.ancilla_cap.unwrap_or_else(|| default_caps(t).0), config.outcome_cap)
}

fn failed(why: impl Into<String>, inputs: String) -> CaseResult {
    CaseResult::new(false, why, inputs)
}

/// Every event is `p · Id`, read off entry by entry.
fn all_multiples_of_identity(t: &Test) -> bool {
    let d = t.input().dim();
    t.events().iter().all(|(_, m)| {
        let p = m.get(0, 0);
        (0..d).all(|r| (0..d).all(|c| if r == c { m.get(r, c) == p } else { m.get(r, c).is_zero() }))
    })
}

fn refines_identity(t: &Test) -> bool {
    t.input() == t.output() && t.full_coarse_graining() == Matrix::identity(t.input().dim())
}

/// The population test, checked against direct evaluation.
fn population_test(config: &SuiteConfig, index: usize) -> Result<(Test, String), CaseResult> {
    let node = atomicity_population(config.seed, index, config.max_dim, config.max_factors);
    let inputs = circuit_source(&node);
    let t = match normal_form(&node) {
        Ok(cf) => cf.semantics(),
        Err(e) => return Err(failed(format!("normalize: {e}"), inputs)),
    };
    match evaluate(&node) {
        Ok(direct) if direct.equivalent(&t) => Ok((t, inputs)),
        Ok(_) => Err(failed("normalized semantics differ from evaluation", inputs)),
        Err(e) => Err(failed(format!("evaluate: {e}"), inputs)),
    }
}

pub(super) fn atomicity(config: &SuiteConfig, index: usize) -> CaseResult {
    let (t, inputs) = match population_test(config, index) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let (ancilla_cap, outcome_cap) = caps(config, &t);
    let member = match membership(&t, ancilla_cap, outcome_cap) {
        MembershipVerdict::InMct(w) => format!("in-mct (dim C = {})", w.form.c.dim()),
        MembershipVerdict::NotInMct(c) => return failed(format!("MCT test rejected: {c}"), inputs),
        MembershipVerdict::Unknown { reason } => format!("membership unknown ({reason})"),
    };
    if !refines_identity(&t) {
        return CaseResult::new(true, format!("{member}; not a refinement of Id"), inputs);
    }
    let ok = all_multiples_of_identity(&t);
    CaseResult::new(ok, format!("{member}; refines Id with {} events, all multiples of Id: {ok}", t.len()), inputs)
}

pub(super) fn niwd(config: &SuiteConfig, index: usize) -> CaseResult {
    let (t, inputs) = match population_test(config, index) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let holds = niwd_check(&t).expect("population tests are square");
    // Induced effects of a refinement of Id are flat.
    let flat = !refines_identity(&t)
        || induced_observation(&t).events().iter().all(|(_, e)| e.data().iter().all(|v| v == &e.data()[0]));
    let evidence = if refines_identity(&t) { "non-disturbing; induced observation trivial" } else { "disturbing" };
    CaseResult::new(holds && flat, evidence, inputs)
}

/// Positive controls appended after the random cases.
pub(super) fn controls(config: &SuiteConfig) -> Vec<CaseResult> {
    let sharp = sharp_test(2);
    let inputs = source_of(&[&sharp], None);
    match config.suite {
        SuiteName::Atomicity => {
            let verdict = membership(&sharp, 4, config.outcome_cap);
            let ok = matches!(verdict, MembershipVerdict::NotInMct(Certificate::Atomicity { .. }));
            let evidence = match &verdict {
                MembershipVerdict::NotInMct(c) => format!("control: not-in-mct ({c})"),
                v => format!("control: {}", v.name()),
            };
            vec![CaseResult::new(ok, evidence, inputs)]
        }
        SuiteName::Niwd => {
            let holds = niwd_check(&sharp).expect("square");
            vec![CaseResult::new(!holds, format!("control: niwd_check = {holds}"), inputs)]
        }
        _ => Vec::new(),
    }
}

pub(super) fn normalize(config: &SuiteConfig, index: usize) -> CaseResult {
    let mut rng = case_rng(config.seed, index as u64);
    let a = random::system(&mut rng, config.max_dim, config.max_factors);
    let node = random::circuit(&mut rng, &a, &circuit_shape(config.max_dim, config.max_factors));
    let inputs = circuit_source(&node);
    let cf = match normal_form(&node) {
        Ok(cf) => cf,
        Err(e) => return failed(format!("normalize: {e}"), inputs),
    };
    let direct = evaluate(&node).expect("generator circuits evaluate");
    let ok = cf.semantics().equivalent(&direct);
    CaseResult::new(ok, format!("{} outcomes; {}", direct.len(), cf.signature()), inputs)
}

/// One permutation checked on every cut: the four sorts and the block swap
/// give back the permutation, and their index maps compose to its index map.
fn check_all_cuts(s: &PermutationSpec) -> Option<(usize, usize)> {
    let n = s.len();
    let target = s.index_map();
    for a in 0..=n {
        for c in 0..=n {
            let d = decompose_bipartite(s, a, c).expect("cuts are in range");
            if d.recompose() != *s {
                return Some((a, c));
            }
            let first = d.s3.tensor(&d.s1);
            let middle = PermutationSpec::identity(d.a_prime.clone())
                .tensor(&PermutationSpec::block_swap(&d.a_second, &d.b_prime))
                .tensor(&PermutationSpec::identity(d.b_second.clone()));
            let last = d.s4.tensor(&d.s2);
            if first.output() != *middle.input() || middle.output() != *last.input() {
                return Some((a, c));
            }
            let (f, m, l) = (first.index_map(), middle.index_map(), last.index_map());
            if (0..target.len()).any(|j| l[m[f[j]]] != target[j]) {
                return Some((a, c));
            }
        }
    }
    None
}

/// Exhaustive: one case per factor list with dimensions in `1..=max_dim`.
pub(super) fn permutation(config: &SuiteConfig) -> Vec<CaseResult> {
    let mut lists: Vec<Vec<usize>> = vec![Vec::new()];
    for n in 1..=config.max_factors {
        lists.extend((0..n).map(|_| 1..=config.max_dim).multi_cartesian_product());
    }
    lists
        .into_par_iter()
        .map(|factors| {
            let input = SystemType::new(factors);
            let n = input.len();
            let mut checked = 0;
            for mapping in (0..n).permutations(n) {
                let s = PermutationSpec::new(input.clone(), mapping).expect("permutations are bijections");
                if let Some((a, c)) = check_all_cuts(&s) {
                    let node = CircuitNode::Permutation(s.clone());
                    return failed(format!("cut {a}|{c} of {s} does not recompose"), circuit_source(&node));
                }
                checked += 1;
            }
            let node = CircuitNode::Identity(input.clone());
            CaseResult::new(true, format!("{input}: {checked} permutations x {} cuts", (n + 1) * (n + 1)), circuit_source(&node))
        })
        .collect()
}

fn check_marginals(w: &CompatibilityWitness, a: &Test, b: &Test) -> bool {
    let (na, nb) = (a.len(), b.len());
    if w.joint.len() != na * nb || w.joint.events().iter().any(|(_, e)| e.data().iter().any(|v| v < &Q::zero())) {
        return false;
    }
    let d = a.input().dim();
    let first = (0..na).all(|x| (0..d).all(|j| sum((0..nb).map(|y| &w.joint.vector(x * nb + y)[j])) == a.vector(x)[j]));
    let second = (0..nb).all(|y| (0..d).all(|j| sum((0..na).map(|x| &w.joint.vector(x * nb + y)[j])) == b.vector(y)[j]));
    first && second && w.verify(a, b)
}

pub(super) fn compatibility(config: &SuiteConfig, index: usize) -> CaseResult {
    let mut rng = case_rng(config.seed, index as u64);
    let s = random::system(&mut rng, config.max_dim, config.max_factors);
    let (na, nb) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    let a = random::observation(&mut rng, &s, na);
    let b = random::observation(&mut rng, &s, nb);
    let inputs = source_of(&[&a, &b], None);
    let product = joint_product(&a, &b).map(|w| check_marginals(&w, &a, &b));
    let lp = joint_lp(&a, &b).map(|w| check_marginals(&w, &a, &b));
    let minmax = match joint_minmax(&a, &b) {
        Ok(Ok(_)) => "valid".to_string(),
        Ok(Err(e)) => format!("rejected ({e})"),
        Err(e) => format!("error ({e})"),
    };
    let ok = matches!(product, Ok(true)) && matches!(lp, Ok(true));
    let show = |r: &Result<bool, _>| match r {
        Ok(true) => "verified".to_string(),
        Ok(false) => "bad marginals".to_string(),
        Err(e) => format!("{e}"),
    };
    CaseResult::new(ok, format!("product {}; lp {}; minmax {minmax}", show(&product), show(&lp)), inputs)
}

pub(super) fn lift(config: &SuiteConfig, index: usize) -> CaseResult {
    let mut rng = case_rng(config.seed, index as u64);
    let a_sys = random::system(&mut rng, config.max_dim, config.max_factors);
    let b_sys = random::system(&mut rng, config.max_dim, config.max_factors);
    let n = rng.gen_range(1..=4);
    let a = random::observation(&mut rng, &a_sys, n);
    let rho = ClassicalEvent::state(b_sys.clone(), random::state(&mut rng, &b_sys)).expect("sampled state");
    let rho_test = Test::from_event(rho.clone());
    let inputs = source_of(&[&a, &rho_test], None);
    let t = match lift_observation(&a, &rho) {
        Ok(t) => t,
        Err(e) => return failed(format!("lift: {e}"), inputs),
    };
    let back = induced_observation(&t);
    let ok = back.equivalent(&a) && t.len() == a.len();
    CaseResult::new(ok, format!("{} outcomes on {a_sys} lifted to {b_sys}", a.len()), inputs)
}

pub(super) fn exclusion(config: &SuiteConfig, index: usize) -> CaseResult {
    let (cf, target) = exclusion_population(config.seed, index, config.max_dim, config.max_factors);
    let t = cf.semantics();
    let inputs = source_of(&[&t, &target], None);
    let (ancilla_cap, outcome_cap) = caps(config, &t);
    let id = Test::identity(t.input().clone());
    match excludes_identity(&t, true, ancilla_cap, outcome_cap) {
        ExclusionVerdict::DoesNotExclude(w) if w.replays(&t, &id) && w.within_mct => {}
        ExclusionVerdict::DoesNotExclude(_) => return failed("identity witness does not replay", inputs),
        ExclusionVerdict::Excludes(c) => return failed(format!("claimed to exclude the identity: {c}"), inputs),
        ExclusionVerdict::Unknown { reason } => return CaseResult::unknown(reason, inputs),
    }
    match excludes(&t, &target, true, ancilla_cap, outcome_cap) {
        Ok(ExclusionVerdict::DoesNotExclude(w)) => {
            let ok = w.replays(&t, &target);
            let evidence = format!("dilation with ancilla {} and {} postprocessings replays: {ok}", w.ancilla, w.postprocessing.len());
            CaseResult::new(ok, evidence, inputs)
        }
        Ok(v) => failed(format!("composed verdict {}", v.name()), inputs),
        Err(e) => failed(format!("{e}"), inputs),
    }
}

pub(super) fn closure(config: &SuiteConfig, index: usize) -> CaseResult {
    let mut rng = case_rng(config.seed, index as u64);
    let (md, mf) = (config.max_dim, config.max_factors);
    let half = (mf / 2).max(1);
    let [a, b, c] = [(); 3].map(|_| random::system(&mut rng, md, mf));
    let f = random::canonical_form(&mut rng, &a, &b, md, 3);
    let g = random::canonical_form(&mut rng, &b, &c, md, 3);
    let [p, q, r, s] = [(); 4].map(|_| random::system(&mut rng, md, half));
    let h = random::canonical_form(&mut rng, &p, &q, md, 3);
    let k = random::canonical_form(&mut rng, &r, &s, md, 3);
    let (ft, gt, ht, kt) = (f.semantics(), g.semantics(), h.semantics(), k.semantics());
    let inputs = source_of(&[&ft, &gt, &ht, &kt], None);
    let seq_ok = match canonical_seq_compose(&f, &g) {
        Ok(fg) => ft.compose_seq(&gt).is_ok_and(|direct| fg.semantics().equivalent(&direct)),
        Err(_) => false,
    };
    let par_ok = canonical_par_compose(&h, &k).semantics().equivalent(&ht.compose_par(&kt));
    CaseResult::new(seq_ok && par_ok, format!("seq {seq_ok}; par {par_ok}"), inputs)
}

pub(super) fn norm(config: &SuiteConfig, index: usize) -> CaseResult {
    let mut rng = case_rng(config.seed, index as u64);
    let (md, mf) = (config.max_dim, config.max_factors);
    let [a0, a, b, b1] = [(); 4].map(|_| random::system(&mut rng, md, mf));
    let delta = random::difference(&mut rng, &a, &b);
    let pre = random::channel(&mut rng, &a0, &a);
    let post = random::channel(&mut rng, &b, &b1);
    let as_test = |m: &Matrix, i: &SystemType, o: &SystemType| {
        Test::new(i.clone(), o.clone(), vec![("0".into(), m.clone())]).expect("shapes line up")
    };
    let inputs = source_of(&[&as_test(&pre, &a0, &a), &as_test(&post, &b, &b1)], None);
    let base = op_norm(&delta);
    let squeezed = op_norm(&post.mul(&delta).mul(&pre));
    let p_in = random::permutation(&mut rng, &a).invert();
    let p_out = random::permutation(&mut rng, &b);
    let permuted = op_norm(&p_out.matrix().mul(&delta).mul(&p_in.matrix()));
    let ok = squeezed <= base && permuted == base;
    CaseResult::new(ok, format!("|Δ| = {base}, |EΔC| = {squeezed}, permuted {permuted}"), inputs)
}

/// One case per dimension `2..=max_dim`, each sweeping `cases` channels.
pub(super) fn broadcast(config: &SuiteConfig) -> Vec<CaseResult> {
    (2..=config.max_dim)
        .map(|dim| {
            let report = broadcast_sweep(dim, config.cases, config.seed).expect("dim ≥ 2");
            let offender = report.broadcasting.iter().chain(&report.outside_mct).next().copied();
            let inputs = match offender {
                Some(i) => {
                    let shape = ChannelShape::ALL[i % ChannelShape::ALL.len()];
                    let ch = Test::from_event(sample_channel(shape, dim, config.seed, i as u64));
                    source_of(&[&ch], None)
                }
                None => format!("# broadcast sweep dim {dim}, {} samples\n", config.cases),
            };
            let evidence = format!(
                "dim {dim}: {} samples, {} broadcasting, {} outside MCT, copy control flagged: {}",
                report.samples,
                report.broadcasting.len(),
                report.outside_mct.len(),
                report.copy_control
            );
            CaseResult::new(report.passed(), evidence, inputs)
        })
        .collect()
}
