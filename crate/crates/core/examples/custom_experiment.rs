//! Describe an experiment in JSON (the format accepted by `bpdn-testgen bench
//! --config`) and run it from code.
//!
//!     cargo run --release --example custom_experiment

use bpdn_testgen::bench::{run_experiment, split_instance_id, ExperimentConfig, RecordStatus};

const CONFIG: &str = r#"{
  "name": "dynrange-small",
  "ensembles": [{"kind": {"type": "three_bases_union"}, "n": 300, "k": 100}],
  "solutions": [
    {"sparsity": 5, "law": {"type": "log_uniform_dynamic_range", "theta": 10.0}},
    {"sparsity": 5, "law": {"type": "log_uniform_dynamic_range", "theta": 10000.0}}
  ],
  "lambdas": [0.1],
  "solvers": [{"kind": "fista"}, {"kind": "gpsr", "alpha_min": 1e-30, "alpha_max": 1e30}, {"kind": "admm", "rho": 1.0}],
  "seeds": [1, 2, 3],
  "tol": 1e-6,
  "max_iter": 20000
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg: ExperimentConfig = serde_json::from_str(CONFIG)?;
    cfg.validate()?;
    for (r, trace) in run_experiment(&cfg)? {
        let (cell, seed) = split_instance_id(&r.instance_id);
        let note = match r.status {
            RecordStatus::Converged => format!("{} iterations", r.iterations),
            other => format!("{other:?}"),
        };
        println!(
            "{cell} seed {seed} Θ = {:>9.1} {:<5} {note} ({} trace rows)",
            r.dynamic_range,
            r.solver.name(),
            trace.map_or(0, |t| t.records.len())
        );
    }
    Ok(())
}
