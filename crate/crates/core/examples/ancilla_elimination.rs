//! Remove the ancilla from a random canonical form without changing its test.

use optmct::mct::eliminate_ancilla;
use optmct::random::{self, case_rng};
use optmct::system::SystemType;

fn main() {
    let mut rng = case_rng(9, 0);
    let a = SystemType::new(vec![2, 3]);
    let b = SystemType::single(2);
    let cf = random::canonical_form(&mut rng, &a, &b, 3, 3);
    println!("before: C={} outcomes {}x{}", cf.c, cf.prep.len(), cf.obs.len());
    let free = eliminate_ancilla(&cf);
    println!("after:  C={} outcomes {}x{}", free.form.c, free.form.prep.len(), free.form.obs.len());
    assert!(free.semantics().equivalent(&cf.semantics()));
    println!("same test: true");
}
