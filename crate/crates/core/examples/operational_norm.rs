//! Operational distance between two deterministic channels.

use optmct::analysis::{op_distance, op_norm};
use optmct::matrix::Matrix;
use optmct::rational::q;
use optmct::system::SystemType;
use optmct::theory::ClassicalEvent;

fn channel(s: &SystemType, rows: [[i64; 2]; 2], denom: i64) -> ClassicalEvent {
    let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&n| q(n, denom)).collect()).collect());
    ClassicalEvent::new(s.clone(), s.clone(), m).unwrap()
}

fn main() {
    let s = SystemType::single(2);
    let flip = channel(&s, [[0, 1], [1, 0]], 1);
    let reprepare = channel(&s, [[1, 1], [2, 2]], 3);
    println!("d(flip, reprepare) = {}", op_distance(&flip, &reprepare).unwrap());
    println!("d(flip, identity)  = {}", op_distance(&flip, &ClassicalEvent::identity(s)).unwrap());
    println!("||flip|| = {}", op_norm(flip.matrix()));
}
