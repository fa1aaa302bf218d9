//! Build one certified instance and check that its prescribed solution is optimal.
//!
//!     cargo run --release --example construct_instance

use bpdn_testgen::certgen::{construct, equivalent_parameters, verify_optimality, MethodChoice};
use bpdn_testgen::ensembles::{coherence, EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
use bpdn_testgen::solvers::objective;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ensemble = EnsembleSpec::new(EnsembleKind::PartialDct, 1000, 200, 42);
    let solution = SolutionSpec::new(20, MagnitudeLaw::Gaussian, 42);
    let lambda = 0.1;

    let inst = construct(&ensemble, &solution, lambda, MethodChoice::Auto)?;
    let cert = &inst.certificate;

    println!("A: {} x {} random DCT rows, coherence {:.4}", inst.k(), inst.n(), coherence(&inst.a)?);
    println!("x*: {} nonzeros ({} positive, {} negative)", inst.pattern.active().len(), inst.pattern.plus().len(), inst.pattern.minus().len());
    println!("certificate: {:?} after {} iterations", cert.method, cert.iterations);
    println!("  ‖Aᵀy − w‖∞          = {:e}", cert.range_residual);
    println!("  sign violation of w  = {:e}", cert.sign_residual);
    println!("  max |w_i| off support = {:.6}", inst.pattern.inactive().iter().map(|&i| cert.w[i].abs()).fold(0.0, f64::max));

    println!("optimality residual of x*: {:e}", verify_optimality(&inst));
    println!("objective at x*: {:.12}", objective(&inst, &inst.x_star));

    let (sigma, tau) = equivalent_parameters(&inst);
    println!("x* also solves  min ‖x‖₁ s.t. ‖Ax − b‖ ≤ {sigma:.6}");
    println!("           and  min ‖Ax − b‖ s.t. ‖x‖₁ ≤ {tau:.6}");
    Ok(())
}
