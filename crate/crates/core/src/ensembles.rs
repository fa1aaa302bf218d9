//! Measurement matrices and prescribed solutions.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`; each
//! generated object draws from its own stream (see the `STREAM_*` constants)
//! so that, e.g., changing the sparsity does not perturb the matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certgen::SignPattern;
use crate::linalg::{self, DenseMatrix, LinalgError};

/// Stream for matrix entries and row selection.
pub const STREAM_MATRIX: u64 = 1;
/// Stream for the support and signs of the solution.
pub const STREAM_PATTERN: u64 = 2;
/// Stream for the nonzero magnitudes of the solution.
pub const STREAM_MAGNITUDE: u64 = 3;

/// Smallest magnitude accepted for a Gaussian nonzero entry.
pub const MIN_MAGNITUDE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("invalid ensemble: {0}")]
    InvalidSpec(String),
    #[error("invalid solution spec: {0}")]
    InvalidSolution(String),
    #[error("column {0} is zero")]
    ZeroColumn(usize),
    #[error("vector has no nonzero entry")]
    AllZero,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// `k` random rows of the orthonormal DCT-II matrix.
    PartialDct,
    /// i.i.d. ±1 entries.
    Bernoulli,
    /// `[I | DCT | Q]` with Q a random orthonormal matrix; requires `n = 3k`.
    ThreeBasesUnion,
    /// Square lower-banded 0/1 matrix with `bandwidth` nonzero diagonals,
    /// scaled to unit spectral norm.
    BandedCoherent { bandwidth: usize },
}

impl EnsembleKind {
    pub fn short_name(&self) -> String {
        match self {
            Self::PartialDct => "dct".into(),
            Self::Bernoulli => "bernoulli".into(),
            Self::ThreeBasesUnion => "threebases".into(),
            Self::BandedCoherent { bandwidth } => format!("banded-K{bandwidth}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    /// Number of variables (columns).
    pub n: usize,
    /// Number of measurements (rows).
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, k: usize, seed: u64) -> Self {
        Self { kind, n, k, seed }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        let bad = |msg: String| Err(EnsembleError::InvalidSpec(msg));
        if self.n == 0 || self.k == 0 {
            return bad(format!("n and k must be positive (n = {}, k = {})", self.n, self.k));
        }
        match self.kind {
            EnsembleKind::BandedCoherent { bandwidth } => {
                if self.k != self.n {
                    return bad(format!("banded matrices are square, got k = {} != n = {}", self.k, self.n));
                }
                if bandwidth == 0 || bandwidth > self.n {
                    return bad(format!("bandwidth K = {bandwidth} must lie in 1..={}", self.n));
                }
            }
            EnsembleKind::ThreeBasesUnion if self.n != 3 * self.k => {
                return bad(format!("union of three bases needs n = 3k, got n = {}, k = {}", self.n, self.k));
            }
            _ if self.k > self.n => {
                return bad(format!("k = {} exceeds n = {}", self.k, self.n));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MagnitudeLaw {
    /// `|N(0, 1)|`, redrawn while below [`MIN_MAGNITUDE`].
    Gaussian,
    /// Log-uniform on `[1, theta]`; one entry is pinned to 1 and one to `theta`.
    LogUniformDynamicRange { theta: f64 },
    /// All magnitudes equal to one (random ±1 solution).
    Unit,
}

impl MagnitudeLaw {
    pub fn short_name(&self) -> String {
        match self {
            Self::Gaussian => "gauss".into(),
            Self::LogUniformDynamicRange { theta } => format!("theta{theta}"),
            Self::Unit => "sign".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionSpec {
    pub sparsity: usize,
    pub law: MagnitudeLaw,
    #[serde(default)]
    pub seed: u64,
}

impl SolutionSpec {
    pub fn new(sparsity: usize, law: MagnitudeLaw, seed: u64) -> Self {
        Self { sparsity, law, seed }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, n: usize) -> Result<(), EnsembleError> {
        if self.sparsity == 0 || self.sparsity > n {
            return Err(EnsembleError::InvalidSolution(format!(
                "sparsity {} must lie in 1..={n}",
                self.sparsity
            )));
        }
        if let MagnitudeLaw::LogUniformDynamicRange { theta } = self.law {
            if !(theta.is_finite() && theta > 1.0) {
                return Err(EnsembleError::InvalidSolution(format!(
                    "dynamic range must be finite and > 1, got {theta}"
                )));
            }
        }
        Ok(())
    }
}

/// Fisher–Yates shuffle of `0..n`.
fn permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

fn banded(n: usize, bandwidth: usize) -> DenseMatrix {
    let mut a = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..(j + bandwidth).min(n) {
            a.set(i, j, 1.0);
        }
    }
    a
}

pub fn build_matrix(spec: &EnsembleSpec) -> Result<DenseMatrix, EnsembleError> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, STREAM_MATRIX);
    let (n, k) = (spec.n, spec.k);
    let a = match spec.kind {
        EnsembleKind::PartialDct => {
            let mut rows = permutation(n, &mut rng);
            rows.truncate(k);
            linalg::dct_matrix(n).select_rows(&rows)
        }
        EnsembleKind::Bernoulli => {
            let data = (0..n * k)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect();
            DenseMatrix::new(k, n, data)?
        }
        EnsembleKind::ThreeBasesUnion => {
            let gauss: Vec<f64> = (0..k * k).map(|_| rng.sample(StandardNormal)).collect();
            let q = linalg::orthonormal_factor(&DenseMatrix::new(k, k, gauss)?);
            let dct = linalg::dct_matrix(k);
            let mut a = DenseMatrix::zeros(k, n);
            for i in 0..k {
                a.set(i, i, 1.0);
                for j in 0..k {
                    a.set(i, k + j, dct.get(i, j));
                    a.set(i, 2 * k + j, q.get(i, j));
                }
            }
            a
        }
        EnsembleKind::BandedCoherent { bandwidth } => {
            let raw = banded(n, bandwidth);
            let norm = linalg::op_norm(&raw, linalg::POWER_TOL)?;
            raw.scaled(1.0 / norm)
        }
    };
    Ok(a)
}

/// Largest absolute cosine between two distinct columns.
pub fn coherence(a: &DenseMatrix) -> Result<f64, EnsembleError> {
    let at = a.transpose();
    let norms: Vec<f64> = (0..at.rows()).map(|j| linalg::norm2(at.row(j))).collect();
    if let Some(j) = norms.iter().position(|&v| v == 0.0) {
        return Err(EnsembleError::ZeroColumn(j));
    }
    let mut mu = 0.0f64;
    for i in 0..at.rows() {
        for j in i + 1..at.rows() {
            let c = linalg::dot(at.row(i), at.row(j)).abs() / (norms[i] * norms[j]);
            mu = mu.max(c);
        }
    }
    Ok(mu)
}

/// Ratio of the largest to the smallest nonzero magnitude.
pub fn dynamic_range(x: &[f64]) -> Result<f64, EnsembleError> {
    let (lo, hi) = x
        .iter()
        .filter(|v| **v != 0.0)
        .map(|v| v.abs())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi == 0.0 {
        return Err(EnsembleError::AllZero);
    }
    Ok(hi / lo)
}

/// Uniformly random support of size `spec.sparsity` with fair random signs.
pub fn random_pattern(n: usize, spec: &SolutionSpec) -> Result<SignPattern, EnsembleError> {
    spec.validate(n)?;
    let mut rng = stream_rng(spec.seed, STREAM_PATTERN);
    let mut support = permutation(n, &mut rng);
    support.truncate(spec.sparsity);
    support.sort_unstable();
    let mut signs = vec![0i8; n];
    for i in support {
        signs[i] = if rng.random::<bool>() { 1 } else { -1 };
    }
    SignPattern::from_signs(&signs).map_err(|e| EnsembleError::InvalidSolution(e.to_string()))
}

/// Solution vector complying with `pattern`, magnitudes drawn per `spec.law`.
pub fn build_solution(spec: &SolutionSpec, pattern: &SignPattern) -> Result<Vec<f64>, EnsembleError> {
    let n = pattern.len();
    spec.validate(n)?;
    let active = pattern.active();
    if active.len() != spec.sparsity {
        return Err(EnsembleError::InvalidSolution(format!(
            "pattern has {} active entries, spec asks for {}",
            active.len(),
            spec.sparsity
        )));
    }
    let s = active.len();
    let mut rng = stream_rng(spec.seed, STREAM_MAGNITUDE);
    let magnitudes: Vec<f64> = match spec.law {
        MagnitudeLaw::Gaussian => (0..s)
            .map(|_| loop {
                let v: f64 = rng.sample::<f64, _>(StandardNormal).abs();
                if v >= MIN_MAGNITUDE {
                    break v;
                }
            })
            .collect(),
        MagnitudeLaw::Unit => vec![1.0; s],
        MagnitudeLaw::LogUniformDynamicRange { theta } => {
            let log_theta = theta.ln();
            let mut mags: Vec<f64> = (0..s)
                .map(|_| (rng.random::<f64>() * log_theta).exp())
                .collect();
            if s == 1 {
                mags[0] = 1.0;
            } else {
                let order = permutation(s, &mut rng);
                mags[order[0]] = 1.0;
                mags[order[1]] = theta;
            }
            mags
        }
    };
    let mut x = vec![0.0; n];
    for (&i, m) in active.iter().zip(magnitudes) {
        x[i] = f64::from(pattern.sign(i)) * m;
    }
    Ok(x)
}
