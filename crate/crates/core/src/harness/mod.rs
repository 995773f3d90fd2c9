//! Property suites over seeded random populations, and their line-delimited
//! reports. Every case is a pure function of the configuration and its
//! index, so a report is byte-identical across runs and thread counts.

mod population;
mod suites;

use std::fmt;
use std::io::{self, Write};

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lang::{CircuitNode, CircuitSource, DeclKind, Emitter};
use crate::theory::Test;

pub use population::{atomicity_population, circuit_shape, exclusion_population, sharp_test};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Atomicity,
    Niwd,
    Broadcast,
    Closure,
    Permutation,
    Compatibility,
    Exclusion,
    Normalize,
    Lift,
    Norm,
}

impl SuiteName {
    pub const ALL: [SuiteName; 10] = [
        SuiteName::Atomicity,
        SuiteName::Niwd,
        SuiteName::Broadcast,
        SuiteName::Closure,
        SuiteName::Permutation,
        SuiteName::Compatibility,
        SuiteName::Exclusion,
        SuiteName::Normalize,
        SuiteName::Lift,
        SuiteName::Norm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Atomicity => "atomicity",
            SuiteName::Niwd => "niwd",
            SuiteName::Broadcast => "broadcast",
            SuiteName::Closure => "closure",
            SuiteName::Permutation => "permutation",
            SuiteName::Compatibility => "compatibility",
            SuiteName::Exclusion => "exclusion",
            SuiteName::Normalize => "normalize",
            SuiteName::Lift => "lift",
            SuiteName::Norm => "norm",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{0} must be at least {1}")]
    TooSmall(&'static str, usize),
    #[error("{0} must be at most {1}")]
    TooLarge(&'static str, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: SuiteName,
    pub cases: usize,
    pub max_dim: usize,
    pub max_factors: usize,
    pub seed: u64,
    /// Largest `dim C` tried by membership and exclusion searches; `None`
    /// uses the per-test default.
    pub ancilla_cap: Option<usize>,
    pub outcome_cap: usize,
}

impl SuiteConfig {
    pub fn new(suite: SuiteName) -> Self {
        Self { suite, cases: 100, max_dim: 3, max_factors: 3, seed: 0, ancilla_cap: None, outcome_cap: 16 }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let min_dim = if self.suite == SuiteName::Permutation { 1 } else { 2 };
        if self.max_dim < min_dim {
            return Err(ConfigError::TooSmall("max-dim", min_dim));
        }
        if self.max_factors < 1 {
            return Err(ConfigError::TooSmall("max-factors", 1));
        }
        if self.suite == SuiteName::Permutation && self.max_factors > 7 {
            return Err(ConfigError::TooLarge("max-factors", 7));
        }
        if self.ancilla_cap == Some(0) {
            return Err(ConfigError::TooSmall("ancilla-cap", 1));
        }
        if self.outcome_cap < 1 {
            return Err(ConfigError::TooSmall("outcome-cap", 1));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub operation: String,
    pub case: usize,
    /// SHA-256 prefix of the case inputs rendered as `.opt` source.
    pub digest: String,
    pub verdict: Verdict,
    /// Witness or certificate summary.
    pub evidence: String,
    pub seed: u64,
    /// The case inputs as `.opt` source; present on failures.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
}

impl Summary {
    pub fn of(records: &[CaseRecord]) -> Self {
        let mut s = Summary::default();
        for r in records {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Unknown => s.unknown += 1,
            }
        }
        s
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.unknown
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: SuiteConfig,
    pub records: Vec<CaseRecord>,
    pub summary: Summary,
}

#[derive(Serialize)]
struct Header<'a> {
    version: &'a str,
    config: &'a SuiteConfig,
}

#[derive(Serialize)]
struct Footer<'a> {
    summary: &'a Summary,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    /// Header line, one line per record, summary line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        serde_json::to_writer(&mut w, &Header { version: &self.version, config: &self.config })?;
        writeln!(w)?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
        serde_json::to_writer(&mut w, &Footer { summary: &self.summary })?;
        writeln!(w)
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }
}

/// What a case produced, before it is stamped with its index and seed.
pub(crate) struct CaseResult {
    pub verdict: Verdict,
    pub evidence: String,
    pub inputs: String,
}

impl CaseResult {
    pub fn new(ok: bool, evidence: impl Into<String>, inputs: String) -> Self {
        let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        Self { verdict, evidence: evidence.into(), inputs }
    }

    pub fn unknown(evidence: impl Into<String>, inputs: String) -> Self {
        Self { verdict: Verdict::Unknown, evidence: evidence.into(), inputs }
    }

    fn into_record(self, operation: &str, case: usize, seed: u64) -> CaseRecord {
        let hash = Sha256::digest(self.inputs.as_bytes());
        let digest: String = hash.iter().take(8).map(|b| format!("{b:02x}")).collect();
        let counterexample = (self.verdict == Verdict::Fail).then_some(self.inputs);
        CaseRecord { operation: operation.into(), case, digest, verdict: self.verdict, evidence: self.evidence, seed, counterexample }
    }
}

fn decl_kind(t: &Test) -> DeclKind {
    if t.input().is_trivial() && !t.output().is_trivial() {
        DeclKind::Prep
    } else if t.output().is_trivial() {
        DeclKind::Obs
    } else {
        DeclKind::Transform
    }
}

/// `.opt` source declaring `tests` and, optionally, a circuit.
pub fn source_of(tests: &[&Test], circuit: Option<&CircuitNode>) -> String {
    let mut em = Emitter::new();
    for t in tests {
        em.test(decl_kind(t), t);
    }
    let expr = circuit.map(|c| em.expr(c));
    em.finish(expr).to_string()
}

pub fn circuit_source(node: &CircuitNode) -> String {
    CircuitSource::from_circuit(node).to_string()
}

/// Runs `config.suite` and collects its records in case order.
pub fn run_suite(config: &SuiteConfig) -> Result<Report, ConfigError> {
    config.validate()?;
    let op = config.suite.as_str();
    let stamp = |results: Vec<CaseResult>| -> Vec<CaseRecord> {
        results.into_iter().enumerate().map(|(i, r)| r.into_record(op, i, config.seed)).collect()
    };
    let records = match config.suite {
        SuiteName::Permutation => stamp(suites::permutation(config)),
        SuiteName::Broadcast => stamp(suites::broadcast(config)),
        suite => {
            let case: fn(&SuiteConfig, usize) -> CaseResult = match suite {
                SuiteName::Atomicity => suites::atomicity,
                SuiteName::Niwd => suites::niwd,
                SuiteName::Closure => suites::closure,
                SuiteName::Compatibility => suites::compatibility,
                SuiteName::Exclusion => suites::exclusion,
                SuiteName::Normalize => suites::normalize,
                SuiteName::Lift => suites::lift,
                SuiteName::Norm => suites::norm,
                SuiteName::Permutation | SuiteName::Broadcast => unreachable!(),
            };
            let mut results: Vec<CaseResult> = (0..config.cases).into_par_iter().map(|i| case(config, i)).collect();
            results.extend(suites::controls(config));
            stamp(results)
        }
    };
    let summary = Summary::of(&records);
    Ok(Report { version: env!("CARGO_PKG_VERSION").into(), config: config.clone(), records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn small(suite: SuiteName) -> SuiteConfig {
        SuiteConfig { cases: 12, max_dim: 2, max_factors: 2, seed: 3, ..SuiteConfig::new(suite) }
    }

    #[test]
    fn reports_are_reproducible() {
        for suite in SuiteName::ALL {
            let config = small(suite);
            let a = run_suite(&config).unwrap().to_jsonl();
            let b = run_suite(&config).unwrap().to_jsonl();
            assert_eq!(a, b, "{suite}");
        }
    }

    #[test]
    fn small_suites_pass() {
        for suite in SuiteName::ALL {
            let r = run_suite(&small(suite)).unwrap();
            assert!(r.passed(), "{suite}: {:?}", r.failures().next());
            assert_eq!(r.summary.total(), r.records.len());
        }
    }

    #[test]
    fn jsonl_layout() {
        let r = run_suite(&small(SuiteName::Lift)).unwrap();
        let lines: Vec<serde_json::Value> = r.to_jsonl().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), r.records.len() + 2);
        assert_eq!(lines[0]["config"]["suite"], "lift");
        assert_eq!(lines[1]["operation"], "lift");
        assert_eq!(lines[1]["digest"].as_str().unwrap().len(), 16);
        assert!(lines[1].get("counterexample").is_none());
        assert_eq!(lines.last().unwrap()["summary"]["pass"], 12);
    }

    #[test]
    fn failures_carry_parseable_counterexamples() {
        let t = population::sharp_test(2);
        let rec = CaseResult::new(false, "forced", source_of(&[&t], None)).into_record("x", 0, 1);
        let src = parse(rec.counterexample.as_deref().unwrap()).unwrap();
        assert!(src.test("t0").unwrap().same_events(&t));
    }

    #[test]
    fn invalid_configs() {
        let mut c = small(SuiteName::Atomicity);
        c.max_dim = 1;
        assert_eq!(run_suite(&c).unwrap_err(), ConfigError::TooSmall("max-dim", 2));
        let mut c = small(SuiteName::Exclusion);
        c.ancilla_cap = Some(0);
        assert!(run_suite(&c).is_err());
        let mut c = small(SuiteName::Permutation);
        c.max_dim = 1;
        assert!(run_suite(&c).is_ok());
    }
}
