//! Banded matrices get harder as the band widens: coherence approaches one and
//! every solver needs more iterations.
//!
//!     cargo run --release --example coherence_study

use bpdn_testgen::bench::{median_iterations, run_experiment, ExperimentConfig};
use bpdn_testgen::ensembles::{build_matrix, coherence, EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
use bpdn_testgen::solvers::{SolverKind, SolverMethod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 120;
    let widths = [2, 5, 20, 120];
    for k in widths {
        let a = build_matrix(&EnsembleSpec::new(EnsembleKind::BandedCoherent { bandwidth: k }, n, n, 0))?;
        println!("K = {k:>3}: μ = {:.6}, √((K−1)/K) = {:.6}", coherence(&a)?, ((k as f64 - 1.0) / k as f64).sqrt());
    }

    let cfg = ExperimentConfig {
        name: "coherence-small".into(),
        ensembles: widths
            .iter()
            .map(|&k| EnsembleSpec::new(EnsembleKind::BandedCoherent { bandwidth: k }, n, n, 0))
            .collect(),
        solutions: vec![SolutionSpec::new(12, MagnitudeLaw::Unit, 0)],
        lambdas: vec![0.1],
        solvers: SolverMethod::defaults(),
        seeds: vec![1, 2, 3],
        tol: 1e-6,
        max_iter: 5000,
        threads: None,
    };
    let records: Vec<_> = run_experiment(&cfg)?.into_iter().map(|(r, _)| r).collect();
    println!("\nmedian iterations to R_n ≤ 1e-6 (cap {}):", cfg.max_iter);
    for k in widths {
        let tag = format!("banded-K{k};");
        let cells: Vec<String> = SolverKind::ALL
            .iter()
            .map(|&s| {
                let m = median_iterations(&records, s, |r| r.instance_id.contains(&tag));
                format!("{}={}", s, m.map_or("-".into(), |v| v.to_string()))
            })
            .collect();
        println!("K = {k:>3}: {}", cells.join("  "));
    }
    Ok(())
}
