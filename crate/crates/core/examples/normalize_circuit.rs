//! Parse a generator circuit and bring it to normal form.

use optmct::lang::{evaluate, parse};
use optmct::mct::normalize;

const SOURCE: &str = "\
system A = [2]
system B = [3]
otest m : B { lo = [1,1,0], hi = [0,0,1] }
ptest s : B { s = [0,1/2,1/2] }
circuit swap(A, B) ; ((obs(m) ; prep(s)) | id(A)) ; swap(B, A)
";

fn main() {
    let src = parse(SOURCE).expect("source parses");
    let node = src.to_circuit().expect("circuit resolves");
    let cf = normalize(&node).expect("generator circuit");
    println!("S1={} A'={} C={} E={} B'={} S2={}", cf.s1, cf.a_prime, cf.c, cf.e, cf.b_prime, cf.s2);
    assert!(cf.semantics().equivalent(&evaluate(&node).unwrap()));
    print!("{}", cf.to_source());
}
