//! Three ways to build a joint observation for two classical observations.

use optmct::analysis::{joint_lp, joint_minmax, joint_product};
use optmct::rational::q;
use optmct::system::SystemType;
use optmct::theory::{Outcome, Test};

fn obs(s: &SystemType, rows: &[(&str, [i64; 3])]) -> Test {
    let effects = rows.iter().map(|(l, r)| (Outcome::atom(*l), r.iter().map(|&n| q(n, 4)).collect())).collect();
    Test::observation(s.clone(), effects).unwrap()
}

fn main() {
    let s = SystemType::single(3);
    let a = obs(&s, &[("0", [4, 1, 0]), ("1", [0, 3, 4])]);
    let b = obs(&s, &[("x", [2, 2, 1]), ("y", [2, 2, 3])]);

    let product = joint_product(&a, &b).unwrap();
    println!("product verifies: {}", product.verify(&a, &b));
    print!("{}", product.joint);

    let lp = joint_lp(&a, &b).unwrap();
    println!("lp verifies: {}", lp.verify(&a, &b));

    match joint_minmax(&a, &b).unwrap() {
        Ok(w) => println!("minmax verifies: {}", w.verify(&a, &b)),
        Err(e) => println!("minmax fails: {e}"),
    }
}
