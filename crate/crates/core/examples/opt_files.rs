//! Evaluate every .opt file shipped in examples/data.

use std::fs;
use std::path::Path;

use optmct::lang::{evaluate, parse};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let mut paths: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    for path in paths {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = fs::read_to_string(&path).unwrap();
        let src = match parse(&text) {
            Ok(s) => s,
            Err(e) => {
                println!("{name}: {e}");
                continue;
            }
        };
        if src.circuit.is_none() {
            println!("{name}: {} declarations", src.tests.len());
            continue;
        }
        let result = src.to_circuit().map_err(|e| e.to_string()).and_then(|c| evaluate(&c).map_err(|e| e.to_string()));
        match result {
            Ok(t) => println!("{name}: circuit {} -> {}, {} outcomes", t.input(), t.output(), t.len()),
            Err(e) => println!("{name}: {e}"),
        }
    }
}
