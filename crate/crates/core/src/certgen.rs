//! Instances of `min ½‖Ax − b‖² + λ‖x‖₁` with a prescribed minimizer.
//!
//! The construction picks a sign pattern, finds a dual certificate
//! `w ∈ rg Aᵀ` with `w ∈ Sign(x*)`, solves `Aᵀy = w`, and sets
//! `b = λy + Ax*`. Then `−Aᵀ(Ax* − b) = λw`, which is exactly the optimality
//! condition of the ℓ1-penalized least-squares problem at `x*`.
//!
//! Three ways to find `w` are provided: alternating projections between
//! `rg Aᵀ` and `Sign(x*)` ([`certify_pocs`]), a box-constrained least-squares
//! reformulation ([`certify_quadprog`]), and a direct solve for matrices with
//! full column rank ([`certify_injective`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensembles::{self, EnsembleError, EnsembleSpec, SolutionSpec};
use crate::linalg::{self, norm2, norm_inf, DenseMatrix, RangeProjector};

pub const POCS_TOL: f64 = 1e-12;
pub const POCS_MAX_ITER: usize = 50_000;
pub const QP_TOL: f64 = 1e-12;
pub const QP_MAX_ITER: usize = 50_000;
/// Window (in iterations) for the stagnation test of the QP solver.
pub const QP_STAGNATION_WINDOW: usize = 100;
/// Minimum relative residual decrease over one window.
pub const QP_STAGNATION_DECREASE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error("index {index} out of range for n = {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("index {0} appears more than once")]
    Duplicate(usize),
    #[error("sign pattern has no active index")]
    NoActive,
    #[error("invalid sign value {0} (expected -1, 0 or 1)")]
    BadSign(i8),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("POCS did not reach tolerance after {iterations} iterations (final gap {gap:e}); the sign pattern is likely not certifiable for this matrix")]
    Infeasible { iterations: usize, gap: f64 },
    #[error("no solution with this sign pattern: QP residual {residual:e} after {iterations} iterations")]
    NoSolutionForPattern { iterations: usize, residual: f64 },
    #[error("both methods failed: {pocs}; {quadprog}")]
    AllMethodsFailed { pocs: Box<CertError>, quadprog: Box<CertError> },
    #[error("matrix is not injective (numerical rank {rank} < n = {n})")]
    NotInjective { rank: usize, n: usize },
    #[error("inactive fill must have {expected} entries in [-1, 1]")]
    InvalidFill { expected: usize },
    #[error("x* violates the sign pattern at index {0}")]
    PatternMismatch(usize),
    #[error("lambda must be positive and finite, got {0}")]
    InvalidLambda(f64),
}

/// Partition of `0..n` into positive-active, negative-active and inactive indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    signs: Vec<i8>,
    plus: Vec<usize>,
    minus: Vec<usize>,
    inactive: Vec<usize>,
}

impl SignPattern {
    pub fn new(n: usize, plus: Vec<usize>, minus: Vec<usize>) -> Result<Self, PatternError> {
        let mut signs = vec![0i8; n];
        for (set, s) in [(&plus, 1i8), (&minus, -1i8)] {
            for &i in set {
                if i >= n {
                    return Err(PatternError::OutOfRange { index: i, n });
                }
                if signs[i] != 0 {
                    return Err(PatternError::Duplicate(i));
                }
                signs[i] = s;
            }
        }
        Self::from_signs(&signs)
    }

    /// From a vector of -1 / 0 / +1.
    pub fn from_signs(signs: &[i8]) -> Result<Self, PatternError> {
        let (mut plus, mut minus, mut inactive) = (Vec::new(), Vec::new(), Vec::new());
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => plus.push(i),
                -1 => minus.push(i),
                0 => inactive.push(i),
                other => return Err(PatternError::BadSign(other)),
            }
        }
        if plus.is_empty() && minus.is_empty() {
            return Err(PatternError::NoActive);
        }
        Ok(Self {
            signs: signs.to_vec(),
            plus,
            minus,
            inactive,
        })
    }

    /// Pattern read off the signs of `x`.
    pub fn from_vector(x: &[f64]) -> Result<Self, PatternError> {
        let signs: Vec<i8> = x
            .iter()
            .map(|&v| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 })
            .collect();
        Self::from_signs(&signs)
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn sign(&self, i: usize) -> i8 {
        self.signs[i]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn plus(&self) -> &[usize] {
        &self.plus
    }

    pub fn minus(&self) -> &[usize] {
        &self.minus
    }

    pub fn inactive(&self) -> &[usize] {
        &self.inactive
    }

    /// Active indices in increasing order.
    pub fn active(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.signs[i] != 0).collect()
    }

    /// Index of the first entry of `x` whose sign disagrees with the pattern.
    pub fn first_violation(&self, x: &[f64]) -> Option<usize> {
        x.iter().zip(&self.signs).position(|(&v, &s)| match s {
            1 => !(v > 0.0),
            -1 => !(v < 0.0),
            _ => v != 0.0,
        })
    }

    /// Projection onto `Sign(x*)`: ±1 on the active set, clamp to [-1, 1] elsewhere.
    pub fn project(&self, v: &[f64], out: &mut [f64]) {
        for ((o, &vi), &s) in out.iter_mut().zip(v).zip(&self.signs) {
            *o = match s {
                0 => vi.clamp(-1.0, 1.0),
                s => f64::from(s),
            };
        }
    }

    /// Largest violation of `w ∈ Sign(x*)`.
    pub fn violation(&self, w: &[f64]) -> f64 {
        w.iter()
            .zip(&self.signs)
            .map(|(&wi, &s)| match s {
                0 => (wi.abs() - 1.0).max(0.0),
                s => (wi - f64::from(s)).abs(),
            })
            .fold(0.0, f64::max)
    }

    /// The ±1 vector on the active set, zero elsewhere.
    pub fn embedded_signs(&self) -> Vec<f64> {
        self.signs.iter().map(|&s| f64::from(s)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertMethod {
    Pocs,
    QuadProg,
    InjectiveDirect,
}

/// Dual certificate `w` and its preimage `y` under `Aᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub w: Vec<f64>,
    pub y: Vec<f64>,
    /// `‖Aᵀy − w‖_∞`
    pub range_residual: f64,
    /// Largest violation of `w ∈ Sign(x*)`.
    pub sign_residual: f64,
    pub method: CertMethod,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PocsOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Starting point; defaults to the embedded sign vector.
    pub w0: Option<Vec<f64>>,
}

impl Default for PocsOptions {
    fn default() -> Self {
        Self {
            tol: POCS_TOL,
            max_iter: POCS_MAX_ITER,
            w0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadProgOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for QuadProgOptions {
    fn default() -> Self {
        Self {
            tol: QP_TOL,
            max_iter: QP_MAX_ITER,
        }
    }
}

/// Holds the factorization of `A` so several certification attempts can share it.
pub struct Certifier<'a> {
    a: &'a DenseMatrix,
    proj: RangeProjector,
}

impl<'a> Certifier<'a> {
    pub fn new(a: &'a DenseMatrix) -> Self {
        Self {
            a,
            proj: RangeProjector::new(a),
        }
    }

    pub fn projector(&self) -> &RangeProjector {
        &self.proj
    }

    fn check_pattern(&self, pattern: &SignPattern) -> Result<(), CertError> {
        if pattern.len() != self.a.cols() {
            return Err(CertError::DimensionMismatch {
                expected: self.a.cols(),
                got: pattern.len(),
            });
        }
        Ok(())
    }

    fn finish(&self, pattern: &SignPattern, w: Vec<f64>, method: CertMethod, iterations: usize) -> Certificate {
        let y = self.proj.solve_transpose(&w);
        let range_residual = norm_inf(&linalg::sub(&self.a.t_matvec(&y), &w));
        Certificate {
            sign_residual: pattern.violation(&w),
            w,
            y,
            range_residual,
            method,
            iterations,
        }
    }

    pub fn pocs(&self, pattern: &SignPattern, opts: &PocsOptions) -> Result<Certificate, CertError> {
        self.check_pattern(pattern)?;
        if !(opts.tol > 0.0) {
            return Err(CertError::InvalidTolerance(opts.tol));
        }
        let n = pattern.len();
        let mut w = match &opts.w0 {
            Some(w0) if w0.len() != n => {
                return Err(CertError::DimensionMismatch {
                    expected: n,
                    got: w0.len(),
                })
            }
            Some(w0) => w0.clone(),
            None => pattern.embedded_signs(),
        };
        let mut v = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut gap = f64::INFINITY;
        for it in 1..=opts.max_iter {
            self.proj.project_into(&w, &mut v);
            pattern.project(&v, &mut next);
            let d_range = norm2(&linalg::sub(&v, &w));
            let d_sign = norm2(&linalg::sub(&next, &v));
            gap = d_range.max(d_sign);
            std::mem::swap(&mut w, &mut next);
            if gap <= opts.tol {
                return Ok(self.finish(pattern, w, CertMethod::Pocs, it));
            }
        }
        Err(CertError::Infeasible {
            iterations: opts.max_iter,
            gap,
        })
    }

    pub fn quadprog(&self, pattern: &SignPattern, opts: &QuadProgOptions) -> Result<Certificate, CertError> {
        self.check_pattern(pattern)?;
        if !(opts.tol > 0.0) {
            return Err(CertError::InvalidTolerance(opts.tol));
        }
        let n = pattern.len();
        let inactive = pattern.inactive();
        let signs = pattern.embedded_signs();

        // v̄ = (I − P) P_Aᵀ s
        let p_s = self.proj.project(&signs);
        let v_bar = linalg::sub(&signs, &p_s);

        let mut full = vec![0.0; n];
        let mut proj_full = vec![0.0; n];
        // P̄ z = (P − I) P_Iᵀ z
        let mut apply_p_bar = |z: &[f64], out: &mut [f64]| {
            full.iter_mut().for_each(|v| *v = 0.0);
            for (&i, &zi) in inactive.iter().zip(z) {
                full[i] = zi;
            }
            self.proj.project_into(&full, out);
            for (o, f) in out.iter_mut().zip(&full) {
                *o -= f;
            }
        };
        // P̄ᵀ r = P_I (P − I) r
        let p_bar_t = |r: &[f64], proj_full: &mut [f64], out: &mut [f64]| {
            self.proj.project_into(r, proj_full);
            for (o, &i) in out.iter_mut().zip(inactive) {
                *o = proj_full[i] - r[i];
            }
        };

        let mut z = vec![0.0; inactive.len()];
        let mut r = vec![0.0; n];
        let mut grad = vec![0.0; inactive.len()];
        let step = if inactive.is_empty() {
            1.0
        } else {
            let mut tmp_n = vec![0.0; n];
            let mut tmp_pf = vec![0.0; n];
            let mut full2 = vec![0.0; n];
            let norm_sq = linalg::power_iteration(
                inactive.len(),
                linalg::POWER_TOL,
                linalg::POWER_MAX_ITER,
                |u, out| {
                    full2.iter_mut().for_each(|v| *v = 0.0);
                    for (&i, &ui) in inactive.iter().zip(u) {
                        full2[i] = ui;
                    }
                    self.proj.project_into(&full2, &mut tmp_n);
                    for (t, f) in tmp_n.iter_mut().zip(&full2) {
                        *t -= f;
                    }
                    p_bar_t(&tmp_n, &mut tmp_pf, out);
                },
            );
            match norm_sq {
                Ok(v) if v > 0.0 => 1.0 / v,
                // P̄ = 0: the residual does not depend on z
                _ => 1.0,
            }
        };

        let mut history: Vec<f64> = Vec::new();
        let mut residual = f64::INFINITY;
        for it in 0..=opts.max_iter {
            apply_p_bar(&z, &mut r);
            for (ri, vi) in r.iter_mut().zip(&v_bar) {
                *ri -= vi;
            }
            residual = norm2(&r);
            if residual <= opts.tol {
                let mut w = signs.clone();
                for (&i, &zi) in inactive.iter().zip(&z) {
                    w[i] = zi;
                }
                return Ok(self.finish(pattern, w, CertMethod::QuadProg, it));
            }
            if it >= QP_STAGNATION_WINDOW {
                let old = history[it - QP_STAGNATION_WINDOW];
                if (old - residual) < QP_STAGNATION_DECREASE * old {
                    return Err(CertError::NoSolutionForPattern {
                        iterations: it,
                        residual,
                    });
                }
            }
            history.push(residual);
            if it == opts.max_iter || inactive.is_empty() {
                break;
            }
            p_bar_t(&r, &mut proj_full, &mut grad);
            for (zi, gi) in z.iter_mut().zip(&grad) {
                *zi = (*zi - step * gi).clamp(-1.0, 1.0);
            }
        }
        Err(CertError::NoSolutionForPattern {
            iterations: history.len(),
            residual,
        })
    }

    pub fn injective(&self, pattern: &SignPattern, inactive_fill: &[f64]) -> Result<Certificate, CertError> {
        self.check_pattern(pattern)?;
        let n = pattern.len();
        if self.proj.rank() < n {
            return Err(CertError::NotInjective {
                rank: self.proj.rank(),
                n,
            });
        }
        let inactive = pattern.inactive();
        if inactive_fill.len() != inactive.len() || inactive_fill.iter().any(|v| !(v.abs() <= 1.0)) {
            return Err(CertError::InvalidFill {
                expected: inactive.len(),
            });
        }
        let mut w = pattern.embedded_signs();
        for (&i, &f) in inactive.iter().zip(inactive_fill) {
            w[i] = f;
        }
        Ok(self.finish(pattern, w, CertMethod::InjectiveDirect, 0))
    }
}

/// Certificate by alternating projections between `rg Aᵀ` and `Sign(x*)`.
pub fn certify_pocs(a: &DenseMatrix, pattern: &SignPattern, opts: &PocsOptions) -> Result<Certificate, CertError> {
    Certifier::new(a).pocs(pattern, opts)
}

/// Certificate by projected gradient on `min ½‖P̄z − v̄‖²`, `‖z‖_∞ ≤ 1`.
pub fn certify_quadprog(
    a: &DenseMatrix,
    pattern: &SignPattern,
    opts: &QuadProgOptions,
) -> Result<Certificate, CertError> {
    Certifier::new(a).quadprog(pattern, opts)
}

/// Certificate for matrices with full column rank: any `w ∈ Sign(x*)` works.
pub fn certify_injective(
    a: &DenseMatrix,
    pattern: &SignPattern,
    inactive_fill: &[f64],
) -> Result<Certificate, CertError> {
    Certifier::new(a).injective(pattern, inactive_fill)
}

/// Provenance of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub ensemble: EnsembleSpec,
    pub solution: SolutionSpec,
}

/// A certified instance `(A, b, λ)` whose minimizer is `x_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub lambda: f64,
    pub x_star: Vec<f64>,
    pub pattern: SignPattern,
    pub certificate: Certificate,
    pub meta: Option<InstanceMeta>,
    pub optimality_residual: f64,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn k(&self) -> usize {
        self.a.rows()
    }
}

/// `b = λy + Ax*`, with the optimality residual of `x*` recorded.
pub fn assemble_instance(
    a: DenseMatrix,
    pattern: SignPattern,
    x_star: Vec<f64>,
    lambda: f64,
    certificate: Certificate,
    meta: Option<InstanceMeta>,
) -> Result<Instance, CertError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CertError::InvalidLambda(lambda));
    }
    for (len, expected) in [
        (pattern.len(), a.cols()),
        (x_star.len(), a.cols()),
        (certificate.w.len(), a.cols()),
        (certificate.y.len(), a.rows()),
    ] {
        if len != expected {
            return Err(CertError::DimensionMismatch { expected, got: len });
        }
    }
    if let Some(i) = pattern.first_violation(&x_star) {
        return Err(CertError::PatternMismatch(i));
    }
    let ax = a.matvec(&x_star);
    let b: Vec<f64> = certificate
        .y
        .iter()
        .zip(&ax)
        .map(|(yi, axi)| lambda * yi + axi)
        .collect();
    let mut inst = Instance {
        a,
        b,
        lambda,
        x_star,
        pattern,
        certificate,
        meta,
        optimality_residual: 0.0,
    };
    inst.optimality_residual = verify_optimality(&inst);
    Ok(inst)
}

/// Largest violation of `−Aᵀ(Ax* − b) ∈ λ Sign(x*)`; zero certifies `x*`.
pub fn verify_optimality(inst: &Instance) -> f64 {
    let mut r = inst.a.matvec(&inst.x_star);
    for (ri, bi) in r.iter_mut().zip(&inst.b) {
        *ri -= bi;
    }
    let g = inst.a.t_matvec(&r);
    let lambda = inst.lambda;
    g.iter()
        .zip(inst.pattern.signs())
        .map(|(&gi, &s)| {
            let gi = -gi;
            match s {
                1 => (gi - lambda).abs(),
                -1 => (gi + lambda).abs(),
                _ => (gi.abs() - lambda).max(0.0),
            }
        })
        .fold(0.0, f64::max)
}

/// `(σ, τ)` such that `x*` also solves the constrained formulations
/// `min ‖x‖₁ s.t. ‖Ax − b‖₂ ≤ σ` and `min ‖Ax − b‖₂ s.t. ‖x‖₁ ≤ τ`.
pub fn equivalent_parameters(inst: &Instance) -> (f64, f64) {
    let ax = inst.a.matvec(&inst.x_star);
    let sigma = norm2(&linalg::sub(&ax, &inst.b));
    (sigma, linalg::norm1(&inst.x_star))
}

/// How to find the certificate when building an instance from specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Pocs,
    QuadProg,
    /// POCS, falling back to the QP formulation when POCS fails.
    PocsThenQuadProg,
    /// Direct solve when A has full column rank, otherwise POCS then QP.
    Auto,
}

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error("certification failed: {0}")]
    Certification(CertError),
    #[error(transparent)]
    Assembly(CertError),
}

/// Matrix, sign pattern, solution and certificate for one `(ensemble, solution)` draw.
/// The certificate does not depend on λ, so one draw serves a whole λ grid.
#[derive(Debug, Clone)]
pub struct CertifiedDraw {
    pub a: DenseMatrix,
    pub pattern: SignPattern,
    pub x_star: Vec<f64>,
    pub certificate: Certificate,
    pub meta: InstanceMeta,
}

impl CertifiedDraw {
    pub fn instance(&self, lambda: f64) -> Result<Instance, CertError> {
        assemble_instance(
            self.a.clone(),
            self.pattern.clone(),
            self.x_star.clone(),
            lambda,
            self.certificate.clone(),
            Some(self.meta),
        )
    }
}

pub fn certify_with(a: &DenseMatrix, pattern: &SignPattern, method: MethodChoice) -> Result<Certificate, CertError> {
    let cert = Certifier::new(a);
    let pocs_then_qp = || {
        cert.pocs(pattern, &PocsOptions::default()).or_else(|pocs| {
            cert.quadprog(pattern, &QuadProgOptions::default()).map_err(|quadprog| match (&pocs, &quadprog) {
                (CertError::Infeasible { .. }, CertError::NoSolutionForPattern { .. }) => {
                    CertError::AllMethodsFailed { pocs: Box::new(pocs), quadprog: Box::new(quadprog) }
                }
                _ => quadprog,
            })
        })
    };
    match method {
        MethodChoice::Pocs => cert.pocs(pattern, &PocsOptions::default()),
        MethodChoice::QuadProg => cert.quadprog(pattern, &QuadProgOptions::default()),
        MethodChoice::PocsThenQuadProg => pocs_then_qp(),
        MethodChoice::Auto if cert.projector().rank() == a.cols() => {
            cert.injective(pattern, &vec![0.0; pattern.inactive().len()])
        }
        MethodChoice::Auto => pocs_then_qp(),
    }
}

/// Builds matrix and solution from their specs and certifies the draw.
pub fn certify_draw(
    ensemble: &EnsembleSpec,
    solution: &SolutionSpec,
    method: MethodChoice,
) -> Result<CertifiedDraw, ConstructError> {
    let a = ensembles::build_matrix(ensemble)?;
    let pattern = ensembles::random_pattern(ensemble.n, solution)?;
    let x_star = ensembles::build_solution(solution, &pattern)?;
    let certificate = certify_with(&a, &pattern, method).map_err(ConstructError::Certification)?;
    Ok(CertifiedDraw {
        a,
        pattern,
        x_star,
        certificate,
        meta: InstanceMeta {
            ensemble: *ensemble,
            solution: *solution,
        },
    })
}

/// Full construction: matrix, sign pattern, solution, certificate, right-hand side.
pub fn construct(
    ensemble: &EnsembleSpec,
    solution: &SolutionSpec,
    lambda: f64,
    method: MethodChoice,
) -> Result<Instance, ConstructError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ConstructError::Assembly(CertError::InvalidLambda(lambda)));
    }
    certify_draw(ensemble, solution, method)?
        .instance(lambda)
        .map_err(ConstructError::Assembly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{EnsembleKind, MagnitudeLaw};

    fn identity_instance(x: Vec<f64>, lambda: f64, w: Vec<f64>) -> Instance {
        let a = DenseMatrix::identity(x.len());
        let pattern = SignPattern::from_vector(&x).unwrap();
        let cert = certify_injective(
            &a,
            &pattern,
            &pattern.inactive().iter().map(|&i| w[i]).collect::<Vec<_>>(),
        )
        .unwrap();
        assemble_instance(a, pattern, x, lambda, cert, None).unwrap()
    }

    #[test]
    fn pattern_validation() {
        assert_eq!(
            SignPattern::new(3, vec![0, 1], vec![1]),
            Err(PatternError::Duplicate(1))
        );
        assert_eq!(
            SignPattern::new(3, vec![3], vec![]),
            Err(PatternError::OutOfRange { index: 3, n: 3 })
        );
        assert_eq!(SignPattern::new(3, vec![], vec![]), Err(PatternError::NoActive));
        let p = SignPattern::new(4, vec![2], vec![0]).unwrap();
        assert_eq!(p.plus(), &[2]);
        assert_eq!(p.minus(), &[0]);
        assert_eq!(p.inactive(), &[1, 3]);
        assert_eq!(p.active(), vec![0, 2]);
    }

    #[test]
    fn sign_projection_clamps() {
        let p = SignPattern::new(4, vec![0], vec![1]).unwrap();
        let mut out = [0.0; 4];
        p.project(&[0.2, 5.0, 1.7, -0.4], &mut out);
        assert_eq!(out, [1.0, -1.0, 1.0, -0.4]);
    }

    #[test]
    fn pocs_identity_one_iteration() {
        let a = DenseMatrix::identity(4);
        let p = SignPattern::new(4, vec![1], vec![3]).unwrap();
        let c = certify_pocs(&a, &p, &PocsOptions::default()).unwrap();
        assert_eq!(c.iterations, 1);
        assert_eq!(c.w, vec![0.0, 1.0, 0.0, -1.0]);
        assert_eq!(c.y, c.w);
        assert_eq!(c.method, CertMethod::Pocs);
    }

    #[test]
    fn opposing_signs_on_rank_one_row_are_infeasible() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let p = SignPattern::new(2, vec![0], vec![1]).unwrap();
        let opts = PocsOptions {
            max_iter: 500,
            ..Default::default()
        };
        assert!(matches!(certify_pocs(&a, &p, &opts), Err(CertError::Infeasible { .. })));
        assert!(matches!(
            certify_quadprog(&a, &p, &QuadProgOptions::default()),
            Err(CertError::NoSolutionForPattern { .. })
        ));
        let msg = certify_with(&a, &p, MethodChoice::PocsThenQuadProg).unwrap_err().to_string();
        assert!(msg.contains("POCS") && msg.contains("QP residual"), "{msg}");
    }

    #[test]
    fn quadprog_empty_inactive_set() {
        let a = DenseMatrix::identity(3);
        let p = SignPattern::new(3, vec![0, 2], vec![1]).unwrap();
        let c = certify_quadprog(&a, &p, &QuadProgOptions::default()).unwrap();
        assert_eq!(c.iterations, 0);
        assert_eq!(c.w, vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn injective_direct() {
        let a = DenseMatrix::identity(3);
        let p = SignPattern::new(3, vec![0], vec![]).unwrap();
        let c = certify_injective(&a, &p, &[0.5, -0.5]).unwrap();
        assert_eq!(c.w, vec![1.0, 0.5, -0.5]);
        assert_eq!(c.y, c.w);
        let wide = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(
            certify_injective(&wide, &p, &[0.0, 0.0]),
            Err(CertError::NotInjective { rank: 2, n: 3 })
        ));
        assert!(matches!(
            certify_injective(&a, &p, &[2.0, 0.0]),
            Err(CertError::InvalidFill { .. })
        ));
    }

    #[test]
    fn identity_instances_closed_form() {
        let inst = identity_instance(vec![1.0, 0.0], 0.1, vec![1.0, 0.0]);
        assert!((inst.b[0] - 1.1).abs() < 1e-15 && inst.b[1] == 0.0);
        assert!(verify_optimality(&inst) <= 1e-15);
        let (sigma, tau) = equivalent_parameters(&inst);
        assert!((sigma - 0.1).abs() < 1e-15);
        assert_eq!(tau, 1.0);

        let inst = identity_instance(vec![0.0, -2.0], 0.5, vec![0.0, -1.0]);
        assert_eq!(inst.b, vec![0.0, -2.5]);
        assert_eq!(verify_optimality(&inst), 0.0);
    }

    #[test]
    fn assembly_rejects_mismatch() {
        let a = DenseMatrix::identity(2);
        let p = SignPattern::new(2, vec![0], vec![]).unwrap();
        let cert = certify_injective(&a, &p, &[0.0]).unwrap();
        let err = assemble_instance(a.clone(), p.clone(), vec![-1.0, 0.0], 0.1, cert.clone(), None);
        assert_eq!(err.unwrap_err(), CertError::PatternMismatch(0));
        let err = assemble_instance(a, p, vec![1.0, 0.0], 0.0, cert, None);
        assert_eq!(err.unwrap_err(), CertError::InvalidLambda(0.0));
    }

    #[test]
    fn perturbed_rhs_is_detected() {
        let ens = EnsembleSpec::new(EnsembleKind::PartialDct, 64, 32, 1);
        let sol = SolutionSpec::new(4, MagnitudeLaw::Gaussian, 1);
        let mut inst = construct(&ens, &sol, 0.1, MethodChoice::Pocs).unwrap();
        assert!(inst.optimality_residual <= 1e-10);
        inst.b[0] += 1.0;
        assert!(verify_optimality(&inst) > inst.lambda / 2.0);
    }

    #[test]
    fn pocs_and_quadprog_on_partial_dct() {
        let ens = EnsembleSpec::new(EnsembleKind::PartialDct, 64, 32, 3);
        let sol = SolutionSpec::new(4, MagnitudeLaw::Gaussian, 3);
        let a = ensembles::build_matrix(&ens).unwrap();
        let p = ensembles::random_pattern(64, &sol).unwrap();
        let c1 = certify_pocs(&a, &p, &PocsOptions::default()).unwrap();
        let c2 = certify_quadprog(&a, &p, &QuadProgOptions::default()).unwrap();
        assert_eq!(c1.sign_residual, 0.0);
        assert!(c1.range_residual <= 1e-10);
        for i in p.active() {
            assert_eq!(c1.w[i], c2.w[i]);
        }
        let x = ensembles::build_solution(&sol, &p).unwrap();
        for c in [c1, c2] {
            let inst = assemble_instance(a.clone(), p.clone(), x.clone(), 0.1, c, None).unwrap();
            assert!(inst.optimality_residual <= 1e-10);
        }
    }

    #[test]
    fn sigma_is_lambda_times_norm_y() {
        let ens = EnsembleSpec::new(EnsembleKind::Bernoulli, 40, 20, 9);
        let sol = SolutionSpec::new(3, MagnitudeLaw::Gaussian, 9);
        let inst = construct(&ens, &sol, 0.3, MethodChoice::Auto).unwrap();
        let (sigma, _) = equivalent_parameters(&inst);
        assert!((sigma - 0.3 * norm2(&inst.certificate.y)).abs() <= 1e-12 * (1.0 + sigma));
    }
}
