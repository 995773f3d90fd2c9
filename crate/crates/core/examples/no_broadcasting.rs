//! Sampled minimal-theory channels never broadcast; the copy channel does.

use optmct::analysis::{broadcast_sweep, copy_channel, is_broadcasting};

fn main() {
    println!("copy channel broadcasts: {}", is_broadcasting(&copy_channel(3)).unwrap());
    for dim in 2..=4 {
        let r = broadcast_sweep(dim, 200, 1).unwrap();
        println!("dim {dim}: {} samples, {} broadcasting, passed {}", r.samples, r.broadcasting.len(), r.passed());
    }
}
