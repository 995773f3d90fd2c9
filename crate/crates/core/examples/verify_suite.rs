//! Run a small property suite and print its JSON Lines report.

use optmct::harness::{run_suite, SuiteConfig, SuiteName};

fn main() {
    let config = SuiteConfig { cases: 5, seed: 3, ..SuiteConfig::new(SuiteName::Closure) };
    let report = run_suite(&config).unwrap();
    print!("{}", report.to_jsonl());
    eprintln!("passed: {}", report.passed());
}
