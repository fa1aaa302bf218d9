//! Run the four reference solvers on one certified instance until the
//! relative error to the known minimizer drops below 1e-6.
//!
//!     cargo run --release --example solver_race -- [lambda]

use bpdn_testgen::certgen::{construct, MethodChoice};
use bpdn_testgen::ensembles::{EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
use bpdn_testgen::solvers::{objective, solve, SolverConfig, SolverKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lambda: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1e-2);
    let inst = construct(
        &EnsembleSpec::new(EnsembleKind::PartialDct, 1000, 200, 7),
        &SolutionSpec::new(20, MagnitudeLaw::Gaussian, 7),
        lambda,
        MethodChoice::Auto,
    )?;
    let f_star = objective(&inst, &inst.x_star);
    println!("DCT 200 x 1000, s = 20, λ = {lambda}, f(x*) = {f_star:.12}");
    println!("{:<6} {:>7} {:>12} {:>12} {:>10}", "solver", "iters", "R_n", "f − f*", "time");
    for kind in SolverKind::ALL {
        let (_, trace) = solve(&inst, &SolverConfig::default_for(kind))?;
        println!(
            "{:<6} {:>7} {:>12.3e} {:>12.3e} {:>9.3}s  {:?}",
            kind.name(),
            trace.iterations(),
            trace.final_rel_error().unwrap_or(f64::NAN),
            trace.final_objective().unwrap_or(f64::NAN) - f_star,
            trace.total_time(),
            trace.status
        );
    }
    Ok(())
}
