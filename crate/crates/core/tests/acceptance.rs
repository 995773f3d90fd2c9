//! The ten acceptance criteria at zero tolerance. Prints one line per
//! criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use optmct::harness::{run_suite, Report, SuiteConfig, SuiteName, Verdict};

fn suite(suite: SuiteName, cases: usize, max_dim: usize, max_factors: usize, seed: u64) -> Report {
    let config = SuiteConfig { cases, max_dim, max_factors, seed, ..SuiteConfig::new(suite) };
    run_suite(&config).expect("valid configuration")
}

fn clean(r: &Report) -> bool {
    r.summary.fail == 0 && r.summary.unknown == 0
}

/// The last record of a suite with a control.
fn control_passed(r: &Report) -> bool {
    r.records.last().is_some_and(|c| c.verdict == Verdict::Pass && c.evidence.starts_with("control"))
}

fn criterion(n: usize, budget: u64, check: impl FnOnce() -> (bool, String)) -> bool {
    let start = Instant::now();
    let (ok, detail) = check();
    let secs = start.elapsed().as_secs_f64();
    let status = if ok { "PASS" } else { "FAIL" };
    println!("{status} criterion {n:>2}: {detail} [{secs:.1}s, budget {budget}s]");
    ok
}

fn main() -> ExitCode {
    let seed = 7;
    let results = [
        criterion(1, 120, || {
            let r = suite(SuiteName::Normalize, 1000, 3, 4, seed);
            (clean(&r) && r.summary.pass == 1000, format!("normalization soundness, {} circuits", r.summary.pass))
        }),
        criterion(2, 60, || {
            let r = suite(SuiteName::Permutation, 0, 3, 5, seed);
            (clean(&r) && r.summary.pass == 364, format!("bipartite recomposition, {} factor lists", r.summary.pass))
        }),
        criterion(3, 120, || {
            let r = suite(SuiteName::Compatibility, 500, 4, 1, seed);
            let r2 = suite(SuiteName::Compatibility, 500, 2, 2, seed + 1);
            let ok = clean(&r) && clean(&r2) && r.summary.pass + r2.summary.pass == 1000;
            (ok, format!("product and LP joint observations, {} pairs", r.summary.pass + r2.summary.pass))
        }),
        criterion(4, 120, || {
            let r = suite(SuiteName::Atomicity, 1000, 3, 3, seed);
            let refining = r.records.iter().filter(|c| c.evidence.contains("refines Id")).count();
            let ok = r.summary.fail == 0 && r.summary.pass == 1001 && control_passed(&r) && refining > 0;
            (ok, format!("atomicity of Id, {} tests ({refining} refine Id), sharp control rejected", r.summary.pass - 1))
        }),
        criterion(5, 30, || {
            let r = suite(SuiteName::Lift, 500, 3, 3, seed);
            (clean(&r) && r.summary.pass == 500, format!("lift then induce, {} pairs", r.summary.pass))
        }),
        criterion(6, 60, || {
            let r = suite(SuiteName::Exclusion, 200, 3, 3, seed);
            (clean(&r) && r.summary.pass == 200, format!("composed exclusion witnesses replay, {} tests", r.summary.pass))
        }),
        criterion(7, 120, || {
            let r = suite(SuiteName::Niwd, 1000, 3, 3, seed);
            (clean(&r) && r.summary.pass == 1001 && control_passed(&r), "NIWD on the atomicity population, sharp control fails it".into())
        }),
        criterion(8, 60, || {
            let r = suite(SuiteName::Broadcast, 500, 4, 1, seed);
            (clean(&r) && r.summary.pass == 3, "no MCT broadcasting for dims 2-4, copy control flagged".into())
        }),
        criterion(9, 60, || {
            let r = suite(SuiteName::Closure, 500, 3, 3, seed);
            (clean(&r) && r.summary.pass == 500, format!("canonical composition closure, {} pairs", r.summary.pass))
        }),
        criterion(10, 30, || {
            let r = suite(SuiteName::Norm, 500, 3, 3, seed);
            (clean(&r) && r.summary.pass == 500, format!("norm monotonicity and permutation invariance, {} triples", r.summary.pass))
        }),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
