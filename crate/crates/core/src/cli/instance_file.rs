//! JSON container for certified instances.
//!
//! Numbers are written in serde_json's shortest round-trip form and read back
//! with exact float parsing, so every vector survives `save → load`
//! bit for bit.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certgen::{self, CertMethod, Certificate, Instance, InstanceMeta, SignPattern};
use crate::ensembles::{EnsembleSpec, SolutionSpec};
use crate::linalg::DenseMatrix;

pub const FORMAT_VERSION: u32 = 1;
/// A loaded file is rejected when its recomputed optimality residual exceeds
/// the stored one by more than this factor.
pub const TAMPER_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format_version: u32,
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    /// Row-major `k × n`.
    pub matrix: Vec<f64>,
    pub b: Vec<f64>,
    pub x_star: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub sigma_equiv: f64,
    pub tau_equiv: f64,
    pub ensemble: Option<EnsembleSpec>,
    pub solution: Option<SolutionSpec>,
    pub seed: Option<u64>,
    pub method: CertMethod,
    pub range_residual: f64,
    pub sign_residual: f64,
    pub certificate_iterations: usize,
    pub coherence: Option<f64>,
    pub optimality_residual: f64,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{path}: optimality residual {recomputed:e} exceeds stored value {stored:e} (file corrupted or edited)")]
    Tampered {
        path: PathBuf,
        stored: f64,
        recomputed: f64,
    },
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance, coherence: Option<f64>) -> Self {
        let (sigma, tau) = certgen::equivalent_parameters(inst);
        let c = &inst.certificate;
        Self {
            format_version: FORMAT_VERSION,
            n: inst.n(),
            k: inst.k(),
            lambda: inst.lambda,
            matrix: inst.a.data().to_vec(),
            b: inst.b.clone(),
            x_star: inst.x_star.clone(),
            y: c.y.clone(),
            w: c.w.clone(),
            sigma_equiv: sigma,
            tau_equiv: tau,
            ensemble: inst.meta.map(|m| m.ensemble),
            solution: inst.meta.map(|m| m.solution),
            seed: inst.meta.map(|m| m.solution.seed),
            method: c.method,
            range_residual: c.range_residual,
            sign_residual: c.sign_residual,
            certificate_iterations: c.iterations,
            coherence,
            optimality_residual: inst.optimality_residual,
        }
    }

    /// Rebuilds the instance; the sign pattern is read off `x_star`.
    /// The optimality residual is recomputed, not copied.
    pub fn to_instance(&self) -> Result<Instance, String> {
        if self.format_version != FORMAT_VERSION {
            return Err(format!("unsupported format_version {}", self.format_version));
        }
        let lens = [
            ("matrix", self.matrix.len(), self.n * self.k),
            ("b", self.b.len(), self.k),
            ("x_star", self.x_star.len(), self.n),
            ("y", self.y.len(), self.k),
            ("w", self.w.len(), self.n),
        ];
        for (name, got, expected) in lens {
            if got != expected {
                return Err(format!("{name} has {got} entries, expected {expected}"));
            }
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(format!("lambda must be positive, got {}", self.lambda));
        }
        let all = [&self.b, &self.x_star, &self.y, &self.w];
        if all.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err("non-finite vector entry".into());
        }
        let a = DenseMatrix::new(self.k, self.n, self.matrix.clone()).map_err(|e| e.to_string())?;
        let pattern = SignPattern::from_vector(&self.x_star).map_err(|e| e.to_string())?;
        let mut inst = Instance {
            a,
            b: self.b.clone(),
            lambda: self.lambda,
            x_star: self.x_star.clone(),
            pattern,
            certificate: Certificate {
                w: self.w.clone(),
                y: self.y.clone(),
                range_residual: self.range_residual,
                sign_residual: self.sign_residual,
                method: self.method,
                iterations: self.certificate_iterations,
            },
            meta: match (self.ensemble, self.solution) {
                (Some(ensemble), Some(solution)) => Some(InstanceMeta { ensemble, solution }),
                _ => None,
            },
            optimality_residual: self.optimality_residual,
        };
        inst.optimality_residual = certgen::verify_optimality(&inst);
        Ok(inst)
    }
}

pub fn save_instance(file: &InstanceFile, path: &Path) -> std::io::Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut out, file)?;
    out.write_all(b"\n")?;
    out.flush()
}

/// Reads, validates and tamper-checks an instance file.
pub fn load_instance(path: &Path) -> Result<(InstanceFile, Instance), LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|source| LoadError::Parse {
        path: path.to_owned(),
        source,
    })?;
    let inst = file.to_instance().map_err(|message| LoadError::Invalid {
        path: path.to_owned(),
        message,
    })?;
    let recomputed = inst.optimality_residual;
    if recomputed > TAMPER_FACTOR * file.optimality_residual && recomputed > 0.0 {
        return Err(LoadError::Tampered {
            path: path.to_owned(),
            stored: file.optimality_residual,
            recomputed,
        });
    }
    Ok((file, inst))
}
