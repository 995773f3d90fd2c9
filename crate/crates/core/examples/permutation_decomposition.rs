//! Split a permutation of factors across an input and an output cut.

use optmct::permutation::{decompose_bipartite, PermutationSpec};
use optmct::system::SystemType;

fn main() {
    let s = SystemType::new(vec![2, 3, 2, 4, 3]);
    let p = PermutationSpec::from_cycles(s, "(0 3)(1 4 2)").unwrap();
    println!("{p}: {} -> {}", p.input(), p.output());
    println!("adjacent swaps: {}", p.to_adjacent_swaps().len());

    let d = decompose_bipartite(&p, 3, 2).unwrap();
    println!("A' = {}  A'' = {}  B' = {}  B'' = {}", d.a_prime, d.a_second, d.b_prime, d.b_second);
    println!("S1 = {}  S2 = {}  S3 = {}  S4 = {}", d.s1, d.s2, d.s3, d.s4);
    assert_eq!(d.recompose(), p);
}
