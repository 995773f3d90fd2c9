use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use optmct::analysis::{
    excludes_identity, joint_lp, joint_minmax, joint_product, op_distance, ExclusionVerdict,
};
use optmct::harness::{run_suite, SuiteConfig, SuiteName};
use optmct::lang::{evaluate, parse, CircuitSource, DeclKind};
use optmct::mct::{default_caps, membership, normalize, MembershipVerdict};
use optmct::theory::{ClassicalEvent, Test};

#[derive(Parser)]
#[command(name = "optmct", version, about = "Exact classical OPT and minimal classical theory toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Caps {
    /// Largest ancilla dimension tried [default: dim A · dim B]
    #[arg(long)]
    ancilla_cap: Option<usize>,
    #[arg(long, default_value_t = 16)]
    outcome_cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the circuit of a file, or print its declared tests
    Eval { file: PathBuf },
    /// Normal form of a generator-only circuit
    Normalize {
        file: PathBuf,
        /// Print the normal form as .opt source
        #[arg(long)]
        emit_opt: bool,
        /// Write the emitted source here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Joint observation of two observation tests
    Compat {
        file: PathBuf,
        #[arg(long)]
        first: Option<String>,
        #[arg(long)]
        second: Option<String>,
    },
    /// Decide membership in the minimal classical theory
    Member {
        file: PathBuf,
        /// A declared test instead of the circuit
        #[arg(long)]
        test: Option<String>,
        #[command(flatten)]
        caps: Caps,
    },
    /// Whether a test excludes the identity
    Irrev {
        file: PathBuf,
        #[arg(long)]
        test: Option<String>,
        /// Allow every classical dilation, not only MCT ones
        #[arg(long)]
        ct: bool,
        #[command(flatten)]
        caps: Caps,
    },
    /// Operational distance between the full coarse-grainings of two tests
    Norm {
        file: PathBuf,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// Run a property suite
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteName,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, default_value_t = 3)]
        max_factors: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        caps: Caps,
        /// Write the report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Exit 1.
    Verdict,
    /// Exit 2.
    Input(String),
    /// Exit 3.
    SelfCheck(String),
}

type CmdResult = Result<(), Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn load(path: &Path) -> Result<CircuitSource, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Input(format!("{}:{e}", path.display())))
}

/// The named test, or the circuit's semantics.
fn pick(src: &CircuitSource, name: Option<&str>) -> Result<Test, Failure> {
    match name {
        Some(n) => src.test(n).map_err(input),
        None => evaluate(&src.to_circuit().map_err(input)?).map_err(input),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_eval(file: &Path) -> CmdResult {
    let src = load(file)?;
    if src.circuit.is_some() {
        let t = evaluate(&src.to_circuit().map_err(input)?).map_err(input)?;
        print!("{t}");
    } else {
        for decl in &src.tests {
            let t = src.test(&decl.name).map_err(input)?;
            print!("{}: {t}", decl.name);
        }
    }
    Ok(())
}

fn cmd_normalize(file: &Path, emit_opt: bool, out: Option<&Path>) -> CmdResult {
    let src = load(file)?;
    let node = src.to_circuit().map_err(input)?;
    let cf = normalize(&node).map_err(input)?;
    let direct = evaluate(&node).map_err(input)?;
    if !cf.semantics().equivalent(&direct) {
        return Err(Failure::SelfCheck("normal form semantics differ from the circuit".into()));
    }
    let emitted = cf.to_source().to_string();
    let again = parse(&emitted)
        .and_then(|s| s.to_circuit())
        .map_err(|e| Failure::SelfCheck(format!("emitted source does not parse: {e}")))?;
    match normalize(&again) {
        Ok(back) if back.signature() == cf.signature() => {}
        _ => return Err(Failure::SelfCheck("emitted source does not re-normalize to the same signature".into())),
    }
    println!("signature: S1={} A'={} C={} E={} B'={} S2={}", cf.s1, cf.a_prime, cf.c, cf.e, cf.b_prime, cf.s2);
    println!("outcomes: {} prep x {} obs", cf.prep.len(), cf.obs.len());
    if emit_opt {
        write_out(out, &emitted)?;
    }
    Ok(())
}

fn cmd_compat(file: &Path, first: Option<&str>, second: Option<&str>) -> CmdResult {
    let src = load(file)?;
    let (a, b) = match (first, second) {
        (Some(x), Some(y)) => (src.test(x).map_err(input)?, src.test(y).map_err(input)?),
        (None, None) => {
            let obs = src.tests_of(DeclKind::Obs).map_err(input)?;
            if obs.len() < 2 {
                return Err(Failure::Input("need two otest declarations or --first/--second".into()));
            }
            (obs[0].1.clone(), obs[1].1.clone())
        }
        _ => return Err(Failure::Input("--first and --second go together".into())),
    };
    let product = joint_product(&a, &b).map_err(input)?;
    println!("product: verified");
    print!("{}", product.joint);
    match joint_lp(&a, &b) {
        Ok(w) if w.verify(&a, &b) => println!("lp: feasible, verified"),
        Ok(_) => return Err(Failure::SelfCheck("lp witness does not verify".into())),
        Err(e) => println!("lp: {e}"),
    }
    match joint_minmax(&a, &b).map_err(input)? {
        Ok(_) => println!("minmax: valid"),
        Err(e) => println!("minmax: rejected ({e})"),
    }
    Ok(())
}

fn caps_for(caps: &Caps, t: &Test) -> (usize, usize) {
    (caps.ancilla_cap.unwrap_or_else(|| default_caps(t).0), caps.outcome_cap)
}

fn cmd_member(file: &Path, test: Option<&str>, caps: &Caps) -> CmdResult {
    let src = load(file)?;
    let t = pick(&src, test)?;
    let (ac, oc) = caps_for(caps, &t);
    match membership(&t, ac, oc) {
        MembershipVerdict::InMct(w) => {
            if !w.replays(&t) {
                return Err(Failure::SelfCheck("witness does not replay".into()));
            }
            println!("in-mct (routing {}, dim C = {})", w.routing, w.form.c.dim());
            println!("# witness");
            print!("{}", w.form.to_source());
            for b in w.partition.blocks() {
                println!("# {} <- {:?}", b.label, b.members);
            }
        }
        MembershipVerdict::NotInMct(c) => println!("not-in-mct: {c}"),
        MembershipVerdict::Unknown { reason } => println!("unknown: {reason}"),
    }
    Ok(())
}

fn cmd_irrev(file: &Path, test: Option<&str>, ct: bool, caps: &Caps) -> CmdResult {
    let src = load(file)?;
    let t = pick(&src, test)?;
    let (ac, oc) = caps_for(caps, &t);
    match excludes_identity(&t, !ct, ac, oc) {
        ExclusionVerdict::Excludes(c) => println!("excludes the identity: {c}"),
        ExclusionVerdict::DoesNotExclude(w) => {
            println!("does not exclude the identity");
            println!("ancilla: {}", w.ancilla);
            print!("dilation {}", w.dilation);
            print!("postprocessing {}", w.postprocessing[0]);
        }
        ExclusionVerdict::Unknown { reason } => println!("unknown: {reason}"),
    }
    Ok(())
}

fn cmd_norm(file: &Path, first: &str, second: &str) -> CmdResult {
    let src = load(file)?;
    let event = |name: &str| -> Result<ClassicalEvent, Failure> {
        let t = src.test(name).map_err(input)?;
        ClassicalEvent::new(t.input().clone(), t.output().clone(), t.full_coarse_graining()).map_err(input)
    };
    let d = op_distance(&event(first)?, &event(second)?).map_err(input)?;
    println!("{d}");
    Ok(())
}

fn cmd_verify(config: SuiteConfig, out: Option<&Path>) -> CmdResult {
    let start = Instant::now();
    let report = run_suite(&config).map_err(input)?;
    let elapsed = start.elapsed();
    let text = report.to_jsonl();
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    let s = report.summary;
    eprintln!("suite          pass  fail  unknown  seconds");
    eprintln!("{:<14} {:>4}  {:>4}  {:>7}  {:>7.2}", config.suite, s.pass, s.fail, s.unknown, elapsed.as_secs_f64());
    for r in report.failures().take(5) {
        eprintln!("fail case {}: {}", r.case, r.evidence);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval { file } => cmd_eval(file),
        Command::Normalize { file, emit_opt, out } => cmd_normalize(file, *emit_opt, out.as_deref()),
        Command::Compat { file, first, second } => cmd_compat(file, first.as_deref(), second.as_deref()),
        Command::Member { file, test, caps } => cmd_member(file, test.as_deref(), caps),
        Command::Irrev { file, test, ct, caps } => cmd_irrev(file, test.as_deref(), *ct, caps),
        Command::Norm { file, first, second } => cmd_norm(file, first, second),
        Command::Verify { suite, cases, max_dim, max_factors, seed, caps, out } => {
            let config = SuiteConfig {
                suite: *suite,
                cases: *cases,
                max_dim: *max_dim,
                max_factors: *max_factors,
                seed: *seed,
                ancilla_cap: caps.ancilla_cap,
                outcome_cap: caps.outcome_cap,
            };
            cmd_verify(config, out.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::SelfCheck(msg)) => {
            eprintln!("self-check failed: {msg}");
            ExitCode::from(3)
        }
    }
}
