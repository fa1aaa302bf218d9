use super::{objective_from_residual, shrink, LoopResult, Problem, Recorder};

/// Accelerated proximal gradient with the standard momentum sequence
/// `t_{k+1} = (1 + √(1 + 4t_k²)) / 2` and constant step `1/‖A‖²`.
///
/// `A y` at the extrapolated point is formed from `A x` of the last two
/// iterates, so each iteration costs one product with `A` and one with `Aᵀ`.
pub(super) fn run(p: &Problem, max_iter: usize, rec: &mut Recorder) -> LoopResult {
    let (k, n) = (p.a.rows(), p.a.cols());
    let step = 1.0 / p.lipschitz;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut ax = vec![0.0; k];
    let mut ax_new = vec![0.0; k];
    let mut ay = vec![0.0; k];
    let mut r = vec![0.0; k];
    let mut grad = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut t = 1.0f64;

    for it in 1..=max_iter {
        for ((ri, ayi), bi) in r.iter_mut().zip(&ay).zip(p.b) {
            *ri = ayi - bi;
        }
        p.a.t_matvec_into(&r, &mut grad);
        for ((xn, yi), gi) in x_new.iter_mut().zip(&y).zip(&grad) {
            *xn = shrink(yi - step * gi, step * p.lambda);
        }
        p.a.matvec_into(&x_new, &mut ax_new);

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        for i in 0..n {
            y[i] = x_new[i] + beta * (x_new[i] - x[i]);
        }
        for i in 0..k {
            ay[i] = ax_new[i] + beta * (ax_new[i] - ax[i]);
        }
        t = t_next;
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut ax, &mut ax_new);

        for ((ri, axi), bi) in r.iter_mut().zip(&ax).zip(p.b) {
            *ri = axi - bi;
        }
        let obj = objective_from_residual(&r, &x, p.lambda);
        if rec.record(it, &x, obj)? {
            return Ok((x, true, None));
        }
    }
    Ok((x, false, None))
}
