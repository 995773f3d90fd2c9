use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn optmct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optmct")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_prints_the_identity() {
    let o = optmct(&["eval", path(&data("identity.opt"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("[2,3] -> [2,3]"), "{text}");
}

#[test]
fn eval_of_a_rank_one_circuit() {
    let o = optmct(&["eval", path(&data("lifted.opt"))]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("3/8"));
}

#[test]
fn malformed_input_exits_2() {
    let o = optmct(&["eval", path(&data("malformed.opt"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("syntax error"));
    let o = optmct(&["eval", "/nonexistent.opt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn normalize_signatures() {
    let o = optmct(&["normalize", path(&data("identity.opt"))]);
    assert!(stdout(&o).contains("E=[2,3]"));
    let o = optmct(&["normalize", path(&data("measure_prepare.opt"))]);
    let text = stdout(&o);
    assert!(text.contains("A'=[2]") && text.contains("B'=[3]"), "{text}");
}

#[test]
fn emitted_normal_form_renormalizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nf.opt");
    let first = optmct(&["normalize", path(&data("swap_network.opt")), "--emit-opt", "--out", out.to_str().unwrap()]);
    assert!(first.status.success(), "{}", stderr(&first));
    let second = optmct(&["normalize", out.to_str().unwrap()]);
    assert!(second.status.success(), "{}", stderr(&second));
    let sig = |o: &Output| stdout(o).lines().next().unwrap().to_string();
    assert_eq!(sig(&first), sig(&second));
}

#[test]
fn normalize_rejects_declared_test_leaves() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("leaf.opt");
    let src = fs::read_to_string(data("tests.opt")).unwrap() + "circuit test(sharp)\n";
    fs::write(&file, src).unwrap();
    let o = optmct(&["normalize", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    // Evaluation still accepts it.
    assert!(optmct(&["eval", file.to_str().unwrap()]).status.success());
}

#[test]
fn compat_reports_each_method() {
    let o = optmct(&["compat", path(&data("observations.opt"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("product: verified"));
    assert!(text.contains("lp: feasible, verified"));
    assert!(text.contains("minmax:"));
}

#[test]
fn member_verdicts() {
    let file = data("tests.opt");
    let verdict = |name: &str| {
        let o = optmct(&["member", path(&file), "--test", name]);
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o).lines().next().unwrap().to_string()
    };
    assert!(verdict("sharp").starts_with("not-in-mct"));
    assert!(verdict("mixture").starts_with("in-mct"));
    assert!(verdict("reprepare").starts_with("in-mct"));
    assert!(verdict("correlated").starts_with("in-mct"));
    assert!(verdict("flip").starts_with("not-in-mct"));
}

#[test]
fn irrev_verdicts() {
    let file = data("tests.opt");
    let verdict = |name: &str, ct: bool| {
        let mut args = vec!["irrev", path(&file), "--test", name];
        if ct {
            args.push("--ct");
        }
        let o = optmct(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o).lines().next().unwrap().to_string()
    };
    assert!(verdict("sharp", false).starts_with("excludes"));
    assert!(verdict("sharp", true).starts_with("does not exclude"));
    assert!(verdict("mixture", false).starts_with("does not exclude"));
    assert!(verdict("reprepare", false).starts_with("does not exclude"));
}

#[test]
fn norm_distance() {
    let o = optmct(&["norm", path(&data("tests.opt")), "--first", "flip", "--second", "reprepare"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "4/3");
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = optmct(&["verify", "--suite", "normalize", "--cases", "8", "--seed", "5", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stderr(&o).contains("suite"));
        fs::read(out).unwrap()
    };
    let a = run("a.jsonl");
    assert_eq!(a, run("b.jsonl"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 10);
}

#[test]
fn verify_rejects_bad_configs() {
    assert_eq!(optmct(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(optmct(&["verify", "--suite", "atomicity", "--ancilla-cap", "0"]).status.code(), Some(2));
    assert_eq!(optmct(&["verify", "--suite", "niwd", "--max-dim", "1"]).status.code(), Some(2));
}
