use std::collections::HashMap;

use super::canonical::{CanonicalForm, Signature};
use super::{MctError, MctResult};
use crate::rational::{zero, Q};

/// The largest class of forms sharing one signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilized {
    pub signature: Signature,
    pub indices: Vec<usize>,
    /// The reprepared states on `B′` when every form in the class is
    /// deterministic (one prep and one obs outcome).
    pub states: Option<Vec<Vec<Q>>>,
}

/// `B′` marginal of a single-outcome form's preparation.
fn reprepared(cf: &CanonicalForm) -> Option<Vec<Q>> {
    if cf.prep.len() != 1 || cf.obs.len() != 1 {
        return None;
    }
    let db = cf.b_prime.dim();
    let mut sigma = vec![zero(); db];
    for (k, v) in cf.prep.vector(0).iter().enumerate() {
        sigma[k % db] += v;
    }
    Some(sigma)
}

/// Pigeonholes `seq` by signature. Ties go to the class seen first.
pub fn stabilize_subsequence(seq: &[CanonicalForm]) -> MctResult<Stabilized> {
    if seq.is_empty() {
        return Err(MctError::EmptySequence);
    }
    let mut order: Vec<Signature> = Vec::new();
    let mut classes: HashMap<Signature, Vec<usize>> = HashMap::new();
    for (i, cf) in seq.iter().enumerate() {
        let sig = cf.signature();
        classes
            .entry(sig.clone())
            .or_insert_with(|| {
                order.push(sig);
                Vec::new()
            })
            .push(i);
    }
    let mut best = &order[0];
    for sig in &order[1..] {
        if classes[sig].len() > classes[best].len() {
            best = sig;
        }
    }
    let indices = classes[best].clone();
    let states = indices.iter().map(|&i| reprepared(&seq[i])).collect();
    Ok(Stabilized { signature: best.clone(), indices, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mct::fixtures::{destroy_reprepare, identity_form};
    use crate::rational::q;
    use crate::system::SystemType;

    #[test]
    fn constant_shape_keeps_everything() {
        let seq: Vec<_> = (1..5).map(|n| destroy_reprepare(2, vec![q(1, n + 1), q(n, n + 1)])).collect();
        let st = stabilize_subsequence(&seq).unwrap();
        assert_eq!(st.indices, vec![0, 1, 2, 3]);
        assert_eq!(st.states.unwrap()[1], vec![q(1, 3), q(2, 3)]);
    }

    #[test]
    fn majority_wins() {
        let a = identity_form(SystemType::single(2));
        let b = destroy_reprepare(2, vec![q(1, 2), q(1, 2)]);
        let seq: Vec<_> = (0..10).map(|i| if i % 3 == 1 { b.clone() } else { a.clone() }).collect();
        let st = stabilize_subsequence(&seq).unwrap();
        assert_eq!(st.indices.len(), 7);
        assert_eq!(st.signature, a.signature());
        assert!(matches!(stabilize_subsequence(&[]), Err(MctError::EmptySequence)));
    }
}
