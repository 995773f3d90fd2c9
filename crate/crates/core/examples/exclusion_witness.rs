//! Does a test exclude the identity? A dilation witness or a certificate.

use optmct::analysis::{excludes_identity, ExclusionVerdict};
use optmct::harness::sharp_test;
use optmct::lang::parse;

const SOURCE: &str = "\
system A = [2]
test mixture : A -> A { a = [[3/10,0],[0,3/10]], b = [[7/10,0],[0,7/10]] }
";

fn show(name: &str, v: &ExclusionVerdict) {
    match v {
        ExclusionVerdict::Excludes(c) => println!("{name}: excludes ({c})"),
        ExclusionVerdict::DoesNotExclude(w) => println!("{name}: does not exclude, ancilla {}", w.ancilla),
        ExclusionVerdict::Unknown { reason } => println!("{name}: unknown ({reason})"),
    }
}

fn main() {
    let mixture = parse(SOURCE).unwrap().test("mixture").unwrap();
    show("mixture", &excludes_identity(&mixture, true, 4, 16));
    let sharp = sharp_test(2);
    show("sharp, minimal theory", &excludes_identity(&sharp, true, 4, 16));
    show("sharp, all classical dilations", &excludes_identity(&sharp, false, 4, 16));
}
