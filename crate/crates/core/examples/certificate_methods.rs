//! The three ways to find a dual certificate, on the same sign pattern, and an
//! infeasible pattern for which both iterative methods give up.
//!
//!     cargo run --release --example certificate_methods

use bpdn_testgen::certgen::{
    certify_injective, certify_pocs, certify_quadprog, PocsOptions, QuadProgOptions, SignPattern,
};
use bpdn_testgen::ensembles::{build_matrix, random_pattern, EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
use bpdn_testgen::linalg::DenseMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = build_matrix(&EnsembleSpec::new(EnsembleKind::PartialDct, 64, 32, 1))?;
    let pattern = random_pattern(64, &SolutionSpec::new(4, MagnitudeLaw::Gaussian, 1))?;
    println!("pattern: + {:?}  − {:?}", pattern.plus(), pattern.minus());

    let pocs = certify_pocs(&a, &pattern, &PocsOptions::default())?;
    let qp = certify_quadprog(&a, &pattern, &QuadProgOptions::default())?;
    for c in [&pocs, &qp] {
        println!(
            "{:>9}: {:5} iterations, range residual {:.2e}, ‖w‖∞ off support {:.4}",
            format!("{:?}", c.method),
            c.iterations,
            c.range_residual,
            pattern.inactive().iter().map(|&i| c.w[i].abs()).fold(0.0, f64::max)
        );
    }
    let diff = pocs.w.iter().zip(&qp.w).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("the two certificates differ by {diff:.3e} in ∞-norm (both are valid)");

    // square invertible matrix: any w in Sign(x*) works
    let banded = build_matrix(&EnsembleSpec::new(EnsembleKind::BandedCoherent { bandwidth: 5 }, 300, 300, 0))?;
    let p = SignPattern::new(300, vec![3, 100], vec![200])?;
    let fill = vec![0.0; p.inactive().len()];
    let direct = certify_injective(&banded, &p, &fill)?;
    println!("injective shortcut on a 300 x 300 banded matrix: range residual {:.2e}", direct.range_residual);

    // rg Aᵀ = span{(1, 1)} contains no vector with signs (+, −)
    let a = DenseMatrix::from_rows(&[vec![1.0, 1.0]])?;
    let p = SignPattern::new(2, vec![0], vec![1])?;
    let opts = PocsOptions { max_iter: 1000, ..PocsOptions::default() };
    println!("A = [1 1], signs (+, −):");
    println!("  POCS: {}", certify_pocs(&a, &p, &opts).unwrap_err());
    println!("  QP:   {}", certify_quadprog(&a, &p, &QuadProgOptions::default()).unwrap_err());
    Ok(())
}
