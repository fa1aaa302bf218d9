use super::{objective_from_residual, shrink, LoopResult, Problem, Recorder};
use crate::linalg::{self, norm_inf};

/// Relative step size below which a continuation stage counts as settled.
const STAGE_TOL: f64 = 1e-3;

/// Proximal gradient with step `1/‖A‖²`. With `continuation = Some(f)` the
/// threshold starts at `0.9‖Aᵀb‖_∞` and is multiplied by `f` each time the
/// iterates settle, until it reaches λ.
pub(super) fn run(p: &Problem, continuation: Option<f64>, max_iter: usize, rec: &mut Recorder) -> LoopResult {
    let (k, n) = (p.a.rows(), p.a.cols());
    let step = 1.0 / p.lipschitz;
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = p.b.iter().map(|v| -v).collect();
    let mut grad = vec![0.0; n];
    let mut ax = vec![0.0; k];

    let mut level = match continuation {
        Some(_) => (0.9 * norm_inf(&p.a.t_matvec(p.b))).max(p.lambda),
        None => p.lambda,
    };

    for it in 1..=max_iter {
        p.a.t_matvec_into(&r, &mut grad);
        let mut change = 0.0;
        for (xi, gi) in x.iter_mut().zip(&grad) {
            let next = shrink(*xi - step * gi, step * level);
            change += (next - *xi) * (next - *xi);
            *xi = next;
        }
        p.a.matvec_into(&x, &mut ax);
        for ((ri, axi), bi) in r.iter_mut().zip(&ax).zip(p.b) {
            *ri = axi - bi;
        }
        let obj = objective_from_residual(&r, &x, p.lambda);
        if rec.record(it, &x, obj)? {
            return Ok((x, true, None));
        }
        if let Some(factor) = continuation {
            if level > p.lambda && change.sqrt() <= STAGE_TOL * linalg::norm2(&x).max(1.0) {
                level = (level * factor).max(p.lambda);
            }
        }
    }
    Ok((x, false, None))
}
