//! A reduced version of the built-in λ study: writes summary.csv, traces.csv
//! and one convergence plot per λ into the given directory.
//!
//!     cargo run --release --example lambda_benchmark -- out/

use std::path::PathBuf;

use bpdn_testgen::bench::{builtin_experiment, emit_csv, plot_convergence, run_experiment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("bpdn-lambda"));
    let mut cfg = builtin_experiment("lambda")?.with_seeds(vec![1, 2]);
    cfg.lambdas = vec![1e-1, 1e-2, 1e-3];

    let results = run_experiment(&cfg)?;
    for (r, _) in &results {
        println!("{:<60} {:<5} {:>6} {:?}", r.instance_id, r.solver.name(), r.iterations, r.status);
    }
    let (summary, traces) = emit_csv(&results, &out)?;
    let plots = plot_convergence(&traces, &out)?;
    println!("\n{}\n{}", summary.display(), traces.display());
    for p in plots {
        println!("{}", p.display());
    }
    Ok(())
}
