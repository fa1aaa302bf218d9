//! Compare certified minimizers with an exhaustive search over sign patterns
//! on instances small enough to enumerate.
//!
//!     cargo run --release --example oracle_check

use bpdn_testgen::certgen::{construct, MethodChoice};
use bpdn_testgen::ensembles::{EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
use bpdn_testgen::linalg::{norm_inf, sub};
use bpdn_testgen::oracle::brute_force_solve;
use bpdn_testgen::solvers::objective;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // When A restricted to the support has a kernel the minimizer is not unique;
    // any two minimizers then share Ax and the objective value.
    println!(
        "{:>4} {:>3} {:>11} {:>11} {:>11} {:>11}",
        "seed", "s", "‖x̂ − x*‖∞", "‖A(x̂ − x*)‖∞", "|f̂ − f*|", "oracle KKT"
    );
    for seed in 1..=10u64 {
        let s = 1 + (seed % 3) as usize;
        let Ok(inst) = construct(
            &EnsembleSpec::new(EnsembleKind::Bernoulli, 10, 6, seed),
            &SolutionSpec::new(s, MagnitudeLaw::Gaussian, seed),
            0.1,
            MethodChoice::Auto,
        ) else {
            println!("{seed:>4} {s:>3}  sign pattern not certifiable for this matrix");
            continue;
        };
        let r = brute_force_solve(&inst.a, &inst.b, inst.lambda)?;
        let d = sub(&r.x_hat, &inst.x_star);
        println!(
            "{seed:>4} {s:>3} {:>11.2e} {:>11.2e} {:>11.2e} {:>11.2e}",
            norm_inf(&d),
            norm_inf(&inst.a.matvec(&d)),
            (r.objective - objective(&inst, &inst.x_star)).abs(),
            r.kkt_residual
        );
    }
    Ok(())
}
