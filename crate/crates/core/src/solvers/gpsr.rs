use super::{objective_from_residual, LoopResult, Problem, Recorder};
use crate::linalg::{self, dot};

pub(super) fn default_alpha_min() -> f64 {
    1e-30
}

pub(super) fn default_alpha_max() -> f64 {
    1e30
}

/// Gradient projection on the split `x = u − v`, `u, v ≥ 0`:
///
/// ```text
/// min  ½‖A(u − v) − b‖² + λ 1ᵀ(u + v)
/// ```
///
/// Each step projects `z − α∇F(z)` onto the nonnegative orthant, moves along
/// the resulting direction with an exact line search clipped to `[0, 1]`
/// (monotone variant), then resets `α` with the Barzilai–Borwein rule.
pub(super) fn run(p: &Problem, alpha_min: f64, alpha_max: f64, max_iter: usize, rec: &mut Recorder) -> LoopResult {
    let (k, n) = (p.a.rows(), p.a.cols());
    let lam = p.lambda;
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = p.b.iter().map(|bi| -bi).collect();
    let mut g = vec![0.0; n];
    let mut du = vec![0.0; n];
    let mut dv = vec![0.0; n];
    let mut dx = vec![0.0; n];
    let mut adx = vec![0.0; k];

    // Cauchy step for the quadratic along Aᵀb
    let atb = p.a.t_matvec(p.b);
    let a_atb = p.a.matvec(&atb);
    let denom = dot(&a_atb, &a_atb);
    let mut alpha = if denom > 0.0 {
        (dot(&atb, &atb) / denom).clamp(alpha_min, alpha_max)
    } else {
        1.0 / p.lipschitz
    };

    for it in 1..=max_iter {
        p.a.t_matvec_into(&r, &mut g);
        let mut g_dot_d = 0.0;
        let mut d_sq = 0.0;
        for i in 0..n {
            let gu = g[i] + lam;
            let gv = -g[i] + lam;
            du[i] = (u[i] - alpha * gu).max(0.0) - u[i];
            dv[i] = (v[i] - alpha * gv).max(0.0) - v[i];
            dx[i] = du[i] - dv[i];
            g_dot_d += gu * du[i] + gv * dv[i];
            d_sq += du[i] * du[i] + dv[i] * dv[i];
        }
        p.a.matvec_into(&dx, &mut adx);
        let curvature = dot(&adx, &adx);
        let t = if curvature > 0.0 {
            (-g_dot_d / curvature).clamp(0.0, 1.0)
        } else {
            1.0
        };
        for i in 0..n {
            u[i] += t * du[i];
            v[i] += t * dv[i];
            x[i] = u[i] - v[i];
        }
        linalg::axpy(t, &adx, &mut r);
        alpha = if curvature > 0.0 {
            (d_sq / curvature).clamp(alpha_min, alpha_max)
        } else {
            alpha_max
        };

        let obj = objective_from_residual(&r, &x, lam);
        if rec.record(it, &x, obj)? {
            return Ok((x, true, None));
        }
    }
    Ok((x, false, None))
}
