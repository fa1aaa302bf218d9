//! Benchmark harness: instance grids, the solver matrix, CSV output and
//! convergence plots.
//!
//! An [`ExperimentConfig`] describes a grid of ensembles × solutions × λ ×
//! seeds. Each `(ensemble, solution, seed)` draw is certified once (POCS,
//! falling back to the QP formulation) and reused for every λ, since the
//! certificate does not depend on λ. Cells whose certification fails are kept
//! in the output with status `certification_failed`.

mod csv_io;
mod plot;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certgen::{self, CertifiedDraw, MethodChoice};
use crate::ensembles::{self, EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
use crate::solvers::{self, SolveStatus, SolverConfig, SolverKind, SolverMethod, SolverTrace};

pub use csv_io::{emit_csv, read_summary, read_traces, write_summary, write_traces, SummaryRow, TraceRow};
pub use plot::{plot_convergence, render_plots, PLOT_FLOOR};

pub const BUILTIN_EXPERIMENTS: [&str; 4] = ["lambda", "sparsity", "dynrange", "coherence"];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("unknown experiment '{0}' (valid: lambda, sparsity, dynrange, coherence)")]
    UnknownExperiment(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("malformed trace CSV at row {row}: {message}")]
    MalformedTrace { row: u64, message: String },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub ensembles: Vec<EnsembleSpec>,
    pub solutions: Vec<SolutionSpec>,
    pub lambdas: Vec<f64>,
    #[serde(default = "SolverMethod::defaults")]
    pub solvers: Vec<SolverMethod>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_tol() -> f64 {
    solvers::DEFAULT_TOL
}

fn default_max_iter() -> usize {
    solvers::DEFAULT_MAX_ITER
}

impl ExperimentConfig {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_owned(),
            source,
        })?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| BenchError::Json {
            path: path.to_owned(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidConfig(m));
        if self.name.is_empty() || self.name.contains([',', '"', '\n', '/', ';']) {
            return bad(format!("experiment name {:?} must be non-empty and free of , \" / ; and newlines", self.name));
        }
        if self.ensembles.is_empty()
            || self.solutions.is_empty()
            || self.lambdas.is_empty()
            || self.solvers.is_empty()
            || self.seeds.is_empty()
        {
            return bad("all grids (ensembles, solutions, lambdas, solvers, seeds) must be non-empty".into());
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return bad(format!("lambda {l} is not positive"));
        }
        for e in &self.ensembles {
            e.validate().map_err(|err| BenchError::InvalidConfig(err.to_string()))?;
            for s in &self.solutions {
                s.validate(e.n)
                    .map_err(|err| BenchError::InvalidConfig(format!("{} with n = {}: {err}", e.kind.short_name(), e.n)))?;
            }
        }
        for m in &self.solvers {
            SolverConfig::new(*m, self.tol, self.max_iter)
                .validate()
                .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }
}

fn sol(s: usize, law: MagnitudeLaw) -> SolutionSpec {
    SolutionSpec::new(s, law, 0)
}

fn base(name: &str, ensembles: Vec<EnsembleSpec>, solutions: Vec<SolutionSpec>, lambdas: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        ensembles,
        solutions,
        lambdas,
        solvers: SolverMethod::defaults(),
        seeds: vec![1],
        tol: default_tol(),
        max_iter: default_max_iter(),
        threads: None,
    }
}

/// Built-in experiment at desk scale.
///
/// * `lambda`: partial DCT, n = 1000, k = 200, s = 20, λ ∈ {1e-1, 1e-2, 1e-4}
/// * `sparsity`: Bernoulli, n = 2000, k = 200, s ∈ {4, 80}, λ = 0.1
/// * `dynrange`: three bases, n = 600, k = 200, s = 10, Θ ∈ {9, 701, 55000}, λ = 0.1
/// * `coherence`: banded, n = 300, K ∈ {5, 40, 100, 300}, s = 30 (±1), λ = 0.1
pub fn builtin_experiment(name: &str) -> Result<ExperimentConfig, BenchError> {
    let dynrange_laws = |s| {
        [9.0, 701.0, 55_000.0]
            .into_iter()
            .map(|theta| sol(s, MagnitudeLaw::LogUniformDynamicRange { theta }))
            .collect::<Vec<_>>()
    };
    let cfg = match name {
        "lambda" => base(
            name,
            vec![EnsembleSpec::new(EnsembleKind::PartialDct, 1000, 200, 0)],
            vec![sol(20, MagnitudeLaw::Gaussian)],
            vec![1e-1, 1e-2, 1e-4],
        ),
        "sparsity" => base(
            name,
            vec![EnsembleSpec::new(EnsembleKind::Bernoulli, 2000, 200, 0)],
            vec![sol(4, MagnitudeLaw::Gaussian), sol(80, MagnitudeLaw::Gaussian)],
            vec![1e-1],
        ),
        "dynrange" => base(
            name,
            vec![EnsembleSpec::new(EnsembleKind::ThreeBasesUnion, 600, 200, 0)],
            dynrange_laws(10),
            vec![1e-1],
        ),
        "coherence" => base(
            name,
            [5, 40, 100, 300]
                .into_iter()
                .map(|bw| EnsembleSpec::new(EnsembleKind::BandedCoherent { bandwidth: bw }, 300, 300, 0))
                .collect(),
            vec![sol(30, MagnitudeLaw::Unit)],
            vec![1e-1],
        ),
        other => return Err(BenchError::UnknownExperiment(other.into())),
    };
    Ok(cfg)
}

/// Built-in experiment at the dimensions of the original study (only
/// `dynrange` differs from desk scale: n = 3000, k = 1000, s = 50).
pub fn builtin_experiment_full_scale(name: &str) -> Result<ExperimentConfig, BenchError> {
    let mut cfg = builtin_experiment(name)?;
    if name == "dynrange" {
        cfg.ensembles = vec![EnsembleSpec::new(EnsembleKind::ThreeBasesUnion, 3000, 1000, 0)];
        for s in &mut cfg.solutions {
            s.sparsity = 50;
        }
    }
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Converged,
    MaxIter,
    NonFinite,
    CertificationFailed,
}

impl RecordStatus {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIter => "max_iter",
            Self::NonFinite => "non_finite",
            Self::CertificationFailed => "certification_failed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Converged, Self::MaxIter, Self::NonFinite, Self::CertificationFailed]
            .into_iter()
            .find(|r| r.name() == s)
    }
}

/// One `(instance, solver)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub experiment: String,
    pub instance_id: String,
    pub solver: SolverKind,
    pub seed: u64,
    pub lambda: f64,
    pub sparsity: usize,
    /// Realized dynamic range of x* (NaN if the draw failed).
    pub dynamic_range: f64,
    /// Column coherence of A (NaN if the draw failed).
    pub coherence: f64,
    /// Iterations until the relative-error target, or `max_iter`.
    pub iterations: usize,
    pub final_rel_error: Option<f64>,
    pub wall_time: f64,
    pub status: RecordStatus,
}

/// Identifier of one instance; everything before `;seed=` names the cell.
pub fn instance_id(ens: &EnsembleSpec, sol: &SolutionSpec, lambda: f64, mu: Option<f64>, seed: u64) -> String {
    let mut id = format!(
        "ens={};n={};k={};sol={};s={};lam={lambda}",
        ens.kind.short_name(),
        ens.n,
        ens.k,
        sol.law.short_name(),
        sol.sparsity
    );
    if let (EnsembleKind::BandedCoherent { .. }, Some(mu)) = (ens.kind, mu) {
        id.push_str(&format!(";mu={mu:.4}"));
    }
    id.push_str(&format!(";seed={seed}"));
    id
}

/// Splits an instance id into its cell key and seed.
pub fn split_instance_id(id: &str) -> (&str, u64) {
    match id.rsplit_once(";seed=") {
        Some((cell, seed)) => (cell, seed.parse().unwrap_or(0)),
        None => (id, 0),
    }
}

struct Draw {
    ens_idx: usize,
    sol_idx: usize,
    seed_idx: usize,
    ensemble: EnsembleSpec,
    solution: SolutionSpec,
    seed: u64,
    outcome: Option<(CertifiedDraw, f64, f64)>,
}

pub type ExperimentOutput = Vec<(BenchRecord, Option<SolverTrace>)>;

/// Runs the whole grid. Results are ordered by ensemble, solution, λ, seed
/// and solver, independent of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, BenchError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| BenchError::Pool(e.to_string()))?;
    Ok(pool.install(|| run_grid(cfg)))
}

fn run_grid(cfg: &ExperimentConfig) -> ExperimentOutput {
    let mut draws: Vec<Draw> = Vec::new();
    for (ens_idx, e) in cfg.ensembles.iter().enumerate() {
        for (sol_idx, s) in cfg.solutions.iter().enumerate() {
            for (seed_idx, &seed) in cfg.seeds.iter().enumerate() {
                draws.push(Draw {
                    ens_idx,
                    sol_idx,
                    seed_idx,
                    ensemble: e.with_seed(seed),
                    solution: s.with_seed(seed),
                    seed,
                    outcome: None,
                });
            }
        }
    }
    draws.par_iter_mut().for_each(|d| {
        d.outcome = certgen::certify_draw(&d.ensemble, &d.solution, MethodChoice::PocsThenQuadProg)
            .ok()
            .map(|draw| {
                let mu = ensembles::coherence(&draw.a).unwrap_or(f64::NAN);
                let theta = ensembles::dynamic_range(&draw.x_star).unwrap_or(f64::NAN);
                (draw, mu, theta)
            });
    });

    struct Task<'a> {
        key: (usize, usize, usize, usize, usize),
        draw: &'a Draw,
        lambda: f64,
        method: SolverMethod,
    }
    let mut tasks = Vec::new();
    for d in &draws {
        for (lam_idx, &lambda) in cfg.lambdas.iter().enumerate() {
            for (solver_idx, &method) in cfg.solvers.iter().enumerate() {
                tasks.push(Task {
                    key: (d.ens_idx, d.sol_idx, lam_idx, d.seed_idx, solver_idx),
                    draw: d,
                    lambda,
                    method,
                });
            }
        }
    }
    tasks.sort_by_key(|t| t.key);

    tasks
        .par_iter()
        .map(|t| {
            let d = t.draw;
            let mu = d.outcome.as_ref().map(|o| o.1);
            let mut record = BenchRecord {
                experiment: cfg.name.clone(),
                instance_id: instance_id(&d.ensemble, &d.solution, t.lambda, mu, d.seed),
                solver: t.method.kind(),
                seed: d.seed,
                lambda: t.lambda,
                sparsity: d.solution.sparsity,
                dynamic_range: f64::NAN,
                coherence: f64::NAN,
                iterations: 0,
                final_rel_error: None,
                wall_time: 0.0,
                status: RecordStatus::CertificationFailed,
            };
            let Some((draw, mu, theta)) = &d.outcome else {
                return (record, None);
            };
            record.coherence = *mu;
            record.dynamic_range = *theta;
            let Ok(inst) = draw.instance(t.lambda) else {
                return (record, None);
            };
            let solver_cfg = SolverConfig::new(t.method, cfg.tol, cfg.max_iter);
            let start = Instant::now();
            match solvers::solve(&inst, &solver_cfg) {
                Ok((_, trace)) => {
                    record.wall_time = start.elapsed().as_secs_f64();
                    record.iterations = trace.iterations();
                    record.final_rel_error = trace.final_rel_error();
                    record.status = match trace.status {
                        SolveStatus::Converged => RecordStatus::Converged,
                        SolveStatus::MaxIter => RecordStatus::MaxIter,
                    };
                    (record, Some(trace))
                }
                Err(_) => {
                    record.wall_time = start.elapsed().as_secs_f64();
                    record.iterations = cfg.max_iter;
                    record.status = RecordStatus::NonFinite;
                    (record, None)
                }
            }
        })
        .collect()
}

/// Median of the iteration counts of `solver` over all records matching `filter`.
pub fn median_iterations(
    records: &[BenchRecord],
    solver: SolverKind,
    filter: impl Fn(&BenchRecord) -> bool,
) -> Option<f64> {
    let mut its: Vec<usize> = records
        .iter()
        .filter(|r| r.solver == solver && r.status != RecordStatus::CertificationFailed && filter(r))
        .map(|r| r.iterations)
        .collect();
    if its.is_empty() {
        return None;
    }
    its.sort_unstable();
    let m = its.len();
    Some(if m % 2 == 1 {
        its[m / 2] as f64
    } else {
        0.5 * (its[m / 2 - 1] + its[m / 2]) as f64
    })
}

/// Distinct cell keys (instance ids without the seed) in first-seen order.
pub fn cell_keys(records: &[BenchRecord]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in records {
        let (cell, _) = split_instance_id(&r.instance_id);
        if seen.insert(cell.to_string()) {
            out.push(cell.to_string());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            name: "tiny".into(),
            ensembles: vec![EnsembleSpec::new(EnsembleKind::PartialDct, 64, 24, 0)],
            solutions: vec![sol(3, MagnitudeLaw::Gaussian)],
            lambdas: vec![0.1, 0.01],
            solvers: SolverMethod::defaults(),
            seeds: vec![1, 2],
            tol: 1e-6,
            max_iter: 5000,
            threads: Some(2),
        }
    }

    #[test]
    fn builtins_validate() {
        for name in BUILTIN_EXPERIMENTS {
            builtin_experiment(name).unwrap().validate().unwrap();
            builtin_experiment_full_scale(name).unwrap().validate().unwrap();
        }
        assert!(matches!(builtin_experiment("nope"), Err(BenchError::UnknownExperiment(_))));
        let lam = builtin_experiment("lambda").unwrap();
        assert_eq!(lam.lambdas, vec![1e-1, 1e-2, 1e-4]);
        assert_eq!((lam.ensembles[0].n, lam.ensembles[0].k), (1000, 200));
    }

    #[test]
    fn config_validation() {
        let mut c = tiny();
        c.seeds.clear();
        assert!(c.validate().is_err());
        let mut c = tiny();
        c.solutions = vec![sol(100, MagnitudeLaw::Gaussian)];
        assert!(c.validate().is_err());
        let mut c = tiny();
        c.lambdas = vec![-1.0];
        assert!(c.validate().is_err());
        let mut c = tiny();
        c.name = "a,b".into();
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_roundtrip() {
        let c = builtin_experiment("coherence").unwrap();
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn grid_shape_and_order() {
        let out = run_experiment(&tiny()).unwrap();
        assert_eq!(out.len(), 2 * 2 * 4);
        let keys: Vec<(String, u64)> = out
            .iter()
            .map(|(r, _)| (r.instance_id.clone(), r.seed))
            .collect();
        assert!(keys[0].0.contains("lam=0.1") && keys[0].1 == 1);
        assert!(keys[4].0.contains("lam=0.1") && keys[4].1 == 2);
        assert!(keys[8].0.contains("lam=0.01"));
        for (r, t) in &out {
            assert_eq!(r.status, RecordStatus::Converged);
            assert!(r.iterations <= 5000);
            assert_eq!(t.as_ref().unwrap().iterations(), r.iterations);
        }
    }

    #[test]
    fn failed_certification_is_recorded() {
        let mut c = tiny();
        // far beyond what 8 measurements can certify
        c.ensembles = vec![EnsembleSpec::new(EnsembleKind::Bernoulli, 40, 4, 0)];
        c.solutions = vec![sol(4, MagnitudeLaw::Gaussian)];
        c.seeds = vec![3];
        c.lambdas = vec![0.1];
        let out = run_experiment(&c).unwrap();
        assert_eq!(out.len(), 4);
        for (r, t) in &out {
            if r.status == RecordStatus::CertificationFailed {
                assert!(t.is_none());
                assert_eq!(r.iterations, 0);
            }
        }
    }

    #[test]
    fn id_roundtrip() {
        let e = EnsembleSpec::new(EnsembleKind::BandedCoherent { bandwidth: 5 }, 300, 300, 0);
        let s = sol(30, MagnitudeLaw::Unit);
        let id = instance_id(&e, &s, 0.1, Some(0.894427), 7);
        assert_eq!(id, "ens=banded-K5;n=300;k=300;sol=sign;s=30;lam=0.1;mu=0.8944;seed=7");
        assert_eq!(split_instance_id(&id), ("ens=banded-K5;n=300;k=300;sol=sign;s=30;lam=0.1;mu=0.8944", 7));
    }

    #[test]
    fn median_cases() {
        let rec = |it| BenchRecord {
            experiment: "e".into(),
            instance_id: "x".into(),
            solver: SolverKind::Ista,
            seed: 0,
            lambda: 0.1,
            sparsity: 1,
            dynamic_range: 1.0,
            coherence: 0.0,
            iterations: it,
            final_rel_error: None,
            wall_time: 0.0,
            status: RecordStatus::Converged,
        };
        let rs = vec![rec(5), rec(1), rec(3), rec(10)];
        assert_eq!(median_iterations(&rs, SolverKind::Ista, |_| true), Some(4.0));
        assert_eq!(median_iterations(&rs[..3], SolverKind::Ista, |_| true), Some(3.0));
        assert_eq!(median_iterations(&rs, SolverKind::Admm, |_| true), None);
    }
}
