use super::{objective_from_residual, shrink, LoopResult, Problem, Recorder};
use crate::linalg::{self, Cholesky};

pub(super) fn default_rho() -> f64 {
    1.0
}

/// ADMM on `min ½‖Ax − b‖² + λ‖z‖₁  s.t.  x = z` (scaled dual `u`).
///
/// The x-update solves `(AᵀA + ρI) x = q` through the Woodbury identity
/// `x = (q − Aᵀ(ρI + AAᵀ)⁻¹ A q) / ρ`, with the `k × k` Cholesky factor
/// computed once. The reported iterate is `z`.
pub(super) fn run(p: &Problem, rho: f64, max_iter: usize, rec: &mut Recorder) -> LoopResult {
    let (k, n) = (p.a.rows(), p.a.cols());
    let mut gram = p.a.gram_rows();
    for i in 0..k {
        let d = gram.get(i, i) + rho;
        gram.set(i, i, d);
    }
    let chol = Cholesky::factor(&gram)?;
    let atb = p.a.t_matvec(p.b);

    let mut x = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut aq = vec![0.0; k];
    let mut back = vec![0.0; n];
    let mut az = vec![0.0; k];
    let mut r = vec![0.0; k];
    let threshold = p.lambda / rho;

    for it in 1..=max_iter {
        for i in 0..n {
            q[i] = atb[i] + rho * (z[i] - u[i]);
        }
        p.a.matvec_into(&q, &mut aq);
        let s = chol.solve(&aq);
        p.a.t_matvec_into(&s, &mut back);
        for i in 0..n {
            x[i] = (q[i] - back[i]) / rho;
            z[i] = shrink(x[i] + u[i], threshold);
            u[i] += x[i] - z[i];
        }
        p.a.matvec_into(&z, &mut az);
        for ((ri, azi), bi) in r.iter_mut().zip(&az).zip(p.b) {
            *ri = azi - bi;
        }
        let obj = objective_from_residual(&r, &z, p.lambda);
        if rec.record(it, &z, obj)? {
            let split = linalg::norm2(&linalg::sub(&x, &z));
            return Ok((z, true, Some(split)));
        }
    }
    let split = linalg::norm2(&linalg::sub(&x, &z));
    Ok((z, false, Some(split)))
}
