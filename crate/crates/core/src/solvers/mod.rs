//! Iterative solvers for `min ½‖Ax − b‖² + λ‖x‖₁`.
//!
//! One member per solver class: iterative soft thresholding (optionally with
//! λ-continuation), FISTA, GPSR with Barzilai–Borwein steps, and ADMM. Every
//! solver ignores its own stopping rule and stops as soon as the relative
//! error `‖x_n − x*‖₂ / ‖x*‖₂` falls below the configured tolerance.

mod admm;
mod fista;
mod gpsr;
mod ista;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certgen::Instance;
use crate::linalg::{self, norm1, norm2, DenseMatrix, LinalgError};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("iterate became non-finite at iteration {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Ista,
    Fista,
    Gpsr,
    Admm,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [Self::Ista, Self::Fista, Self::Gpsr, Self::Admm];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ista => "ista",
            Self::Fista => "fista",
            Self::Gpsr => "gpsr",
            Self::Admm => "admm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Solver choice together with its tuning knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverMethod {
    Ista {
        /// Geometric λ-continuation factor in (0, 1); `None` disables continuation.
        #[serde(default)]
        continuation: Option<f64>,
    },
    Fista,
    Gpsr {
        #[serde(default = "gpsr::default_alpha_min")]
        alpha_min: f64,
        #[serde(default = "gpsr::default_alpha_max")]
        alpha_max: f64,
    },
    Admm {
        #[serde(default = "admm::default_rho")]
        rho: f64,
    },
}

impl SolverMethod {
    pub fn kind(&self) -> SolverKind {
        match self {
            Self::Ista { .. } => SolverKind::Ista,
            Self::Fista => SolverKind::Fista,
            Self::Gpsr { .. } => SolverKind::Gpsr,
            Self::Admm { .. } => SolverKind::Admm,
        }
    }

    /// Default knobs for `kind`.
    pub fn default_for(kind: SolverKind) -> Self {
        match kind {
            SolverKind::Ista => Self::Ista { continuation: None },
            SolverKind::Fista => Self::Fista,
            SolverKind::Gpsr => Self::Gpsr {
                alpha_min: gpsr::default_alpha_min(),
                alpha_max: gpsr::default_alpha_max(),
            },
            SolverKind::Admm => Self::Admm {
                rho: admm::default_rho(),
            },
        }
    }

    pub fn defaults() -> Vec<Self> {
        SolverKind::ALL.into_iter().map(Self::default_for).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub tol_rel_error: f64,
    pub max_iter: usize,
}

impl SolverConfig {
    pub fn new(method: SolverMethod, tol_rel_error: f64, max_iter: usize) -> Self {
        Self {
            method,
            tol_rel_error,
            max_iter,
        }
    }

    pub fn default_for(kind: SolverKind) -> Self {
        Self::new(SolverMethod::default_for(kind), DEFAULT_TOL, DEFAULT_MAX_ITER)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol_rel_error > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "tol_rel_error must be positive, got {}",
                self.tol_rel_error
            )));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidConfig("max_iter must be at least 1".into()));
        }
        match self.method {
            SolverMethod::Ista {
                continuation: Some(f),
            } if !(f > 0.0 && f < 1.0) => Err(SolverError::InvalidConfig(format!(
                "continuation factor must lie in (0, 1), got {f}"
            ))),
            SolverMethod::Gpsr { alpha_min, alpha_max } if !(alpha_min > 0.0 && alpha_min <= alpha_max) => {
                Err(SolverError::InvalidConfig(format!(
                    "need 0 < alpha_min <= alpha_max, got [{alpha_min}, {alpha_max}]"
                )))
            }
            SolverMethod::Admm { rho } if !(rho > 0.0 && rho.is_finite()) => Err(SolverError::InvalidConfig(
                format!("rho must be positive, got {rho}"),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub rel_error: f64,
    pub objective: f64,
    /// Seconds since the solve started.
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub solver: SolverKind,
    pub records: Vec<IterRecord>,
    pub status: SolveStatus,
    /// ADMM only: `‖x − z‖₂` between the two split variables at exit.
    pub splitting_residual: Option<f64>,
}

impl SolverTrace {
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    pub fn final_rel_error(&self) -> Option<f64> {
        self.records.last().map(|r| r.rel_error)
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.records.last().map(|r| r.objective)
    }

    pub fn total_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.elapsed)
    }
}

/// Componentwise `sign(x_i) max(|x_i| − θ, 0)`.
pub fn soft_threshold(x: &[f64], theta: f64) -> Vec<f64> {
    x.iter().map(|&v| shrink(v, theta)).collect()
}

#[inline]
pub(crate) fn shrink(v: f64, theta: f64) -> f64 {
    if v > theta {
        v - theta
    } else if v < -theta {
        v + theta
    } else {
        0.0
    }
}

/// `½‖Ax − b‖² + λ‖x‖₁`
pub fn objective(inst: &Instance, x: &[f64]) -> f64 {
    let r = linalg::sub(&inst.a.matvec(x), &inst.b);
    0.5 * linalg::dot(&r, &r) + inst.lambda * norm1(x)
}

/// Objective given a precomputed residual `Ax − b`.
#[inline]
pub(crate) fn objective_from_residual(residual: &[f64], x: &[f64], lambda: f64) -> f64 {
    0.5 * linalg::dot(residual, residual) + lambda * norm1(x)
}

/// Read-only problem data shared by the solver loops.
pub(crate) struct Problem<'a> {
    pub a: &'a DenseMatrix,
    pub b: &'a [f64],
    pub lambda: f64,
    /// `‖A‖²`, the Lipschitz constant of the smooth part's gradient.
    pub lipschitz: f64,
}

/// Per-iteration bookkeeping and the relative-error stopping rule.
pub(crate) struct Recorder<'a> {
    x_star: &'a [f64],
    x_star_norm: f64,
    tol: f64,
    start: Instant,
    records: Vec<IterRecord>,
}

impl<'a> Recorder<'a> {
    fn new(x_star: &'a [f64], tol: f64) -> Self {
        Self {
            x_star,
            x_star_norm: norm2(x_star),
            tol,
            start: Instant::now(),
            records: Vec::new(),
        }
    }

    /// Records iterate `x` and reports whether the stopping rule fired.
    pub fn record(&mut self, iter: usize, x: &[f64], objective: f64) -> Result<bool, SolverError> {
        if !objective.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite(iter));
        }
        let diff: f64 = x
            .iter()
            .zip(self.x_star)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let rel_error = diff / self.x_star_norm;
        self.records.push(IterRecord {
            iter,
            rel_error,
            objective,
            elapsed: self.start.elapsed().as_secs_f64(),
        });
        Ok(rel_error <= self.tol)
    }

    fn finish(self, solver: SolverKind, converged: bool, splitting_residual: Option<f64>) -> SolverTrace {
        SolverTrace {
            solver,
            records: self.records,
            status: if converged {
                SolveStatus::Converged
            } else {
                SolveStatus::MaxIter
            },
            splitting_residual,
        }
    }
}

/// Outcome of a solver loop: final iterate, convergence flag, and an
/// optional splitting residual.
pub(crate) type LoopResult = Result<(Vec<f64>, bool, Option<f64>), SolverError>;

/// Runs one solver on a certified instance.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<(Vec<f64>, SolverTrace), SolverError> {
    cfg.validate()?;
    let norm = linalg::op_norm(&inst.a, linalg::POWER_TOL)?;
    let problem = Problem {
        a: &inst.a,
        b: &inst.b,
        lambda: inst.lambda,
        lipschitz: norm * norm,
    };
    let mut rec = Recorder::new(&inst.x_star, cfg.tol_rel_error);
    let (x, converged, split) = match cfg.method {
        SolverMethod::Ista { continuation } => ista::run(&problem, continuation, cfg.max_iter, &mut rec),
        SolverMethod::Fista => fista::run(&problem, cfg.max_iter, &mut rec),
        SolverMethod::Gpsr { alpha_min, alpha_max } => {
            gpsr::run(&problem, alpha_min, alpha_max, cfg.max_iter, &mut rec)
        }
        SolverMethod::Admm { rho } => admm::run(&problem, rho, cfg.max_iter, &mut rec),
    }?;
    Ok((x, rec.finish(cfg.method.kind(), converged, split)))
}
