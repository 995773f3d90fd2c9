//! The sharp test refines the identity but is not a minimal-theory test.

use optmct::harness::sharp_test;
use optmct::matrix::Matrix;
use optmct::mct::{is_atomic_identity_refinement, membership, MembershipVerdict};
use optmct::rational::q;
use optmct::system::SystemType;
use optmct::theory::{Outcome, Test};

fn main() {
    let sharp = sharp_test(3);
    println!("sharp sums to the identity: {}", sharp.full_coarse_graining() == Matrix::identity(3));
    println!("sharp events are multiples of the identity: {}", is_atomic_identity_refinement(&sharp).is_some());
    println!("sharp: {}", membership(&sharp, 9, 16).name());

    let s = SystemType::single(3);
    let id = Matrix::identity(3);
    let noisy = Test::new(
        s.clone(),
        s,
        vec![(Outcome::atom("a"), id.scale(&q(1, 3))), (Outcome::atom("b"), id.scale(&q(2, 3)))],
    )
    .unwrap();
    if let MembershipVerdict::InMct(w) = membership(&noisy, 9, 16) {
        let weights = is_atomic_identity_refinement(&noisy).unwrap();
        println!("coin flip {:?} next to the identity: in MCT, ancilla {}", weights.iter().map(ToString::to_string).collect::<Vec<_>>(), w.form.c);
        print!("{}", w.form.to_source());
    }
}
