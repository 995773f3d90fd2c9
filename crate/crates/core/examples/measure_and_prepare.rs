//! Build a measure-and-prepare channel by hand and read off its statistics.

use optmct::rational::q;
use optmct::system::SystemType;
use optmct::theory::{format_distribution, probability, validate, ClassicalEvent, Outcome, Test};

fn main() {
    let a = SystemType::single(2);
    let b = SystemType::single(3);
    let obs = Test::observation(
        a.clone(),
        vec![(Outcome::atom("yes"), vec![q(3, 4), q(1, 4)]), (Outcome::atom("no"), vec![q(1, 4), q(3, 4)])],
    )
    .unwrap();
    let prep = Test::preparation(b.clone(), vec![(Outcome::atom("r"), vec![q(1, 2), q(1, 3), q(1, 6)])]).unwrap();
    let t = obs.compose_seq(&prep).unwrap();
    println!("{t}");
    println!("valid: {}", validate(&t).is_valid());

    let rho = ClassicalEvent::state(a, vec![q(2, 3), q(1, 3)]).unwrap();
    let read = Test::observation(b, vec![(Outcome::atom("u"), vec![q(1, 1); 3])]).unwrap();
    print!("{}", format_distribution(&probability(&rho, &t, &read).unwrap()));
}
