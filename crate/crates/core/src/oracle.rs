//! Exact solutions of tiny instances by enumerating sign patterns.
//!
//! For every support `S` (by increasing size, lexicographic within a size)
//! and every sign vector `s` on it, the candidate `x_S` solves the reduced
//! normal equations `A_SᵀA_S x_S = A_Sᵀb − λs`. A candidate is optimal when
//! its signs match `s` and the off-support correlations stay below λ.
//! This module shares no code with the certificate construction; it works
//! from the Gram matrix with its own small Cholesky solver.

use thiserror::Error;

use crate::linalg::DenseMatrix;

/// Largest `n` accepted (the search visits up to `3ⁿ` patterns).
pub const MAX_VARIABLES: usize = 14;
/// Slack on the inactive-set condition `|gᵢ| ≤ λ`.
pub const KKT_SLACK: f64 = 1e-10;
/// Relative pivot size below which a support counts as rank deficient.
const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("brute force needs n <= {MAX_VARIABLES}, got {0}")]
    TooLarge(usize),
    #[error("right-hand side has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lambda must be positive, got {0}")]
    InvalidLambda(f64),
    #[error("no sign pattern satisfies the optimality conditions")]
    NoSolutionFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub x_hat: Vec<f64>,
    /// Signs of `x_hat` (-1, 0, +1).
    pub signs: Vec<i8>,
    /// Largest violation of the optimality conditions at `x_hat`.
    pub kkt_residual: f64,
    pub objective: f64,
}

struct SmallCholesky {
    m: usize,
    l: Vec<f64>,
}

impl SmallCholesky {
    fn factor(g: &[f64], n: usize, idx: &[usize]) -> Option<Self> {
        let m = idx.len();
        let scale = idx.iter().map(|&i| g[i * n + i]).fold(0.0, f64::max);
        if scale <= 0.0 {
            return None;
        }
        let mut l = vec![0.0; m * m];
        for j in 0..m {
            let mut d = g[idx[j] * n + idx[j]];
            for p in 0..j {
                d -= l[j * m + p] * l[j * m + p];
            }
            if d <= PIVOT_TOL * scale {
                return None;
            }
            let d = d.sqrt();
            l[j * m + j] = d;
            for i in j + 1..m {
                let mut s = g[idx[i] * n + idx[j]];
                for p in 0..j {
                    s -= l[i * m + p] * l[j * m + p];
                }
                l[i * m + j] = s / d;
            }
        }
        Some(Self { m, l })
    }

    fn solve(&self, rhs: &mut [f64]) {
        let m = self.m;
        for i in 0..m {
            let mut s = rhs[i];
            for p in 0..i {
                s -= self.l[i * m + p] * rhs[p];
            }
            rhs[i] = s / self.l[i * m + i];
        }
        for i in (0..m).rev() {
            let mut s = rhs[i];
            for p in i + 1..m {
                s -= self.l[p * m + i] * rhs[p];
            }
            rhs[i] = s / self.l[i * m + i];
        }
    }
}

/// Supports of size `size` over `0..n` in lexicographic order.
fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        f(&idx);
        let Some(i) = (0..size).rev().find(|&i| idx[i] < n - size + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn objective(a: &DenseMatrix, b: &[f64], lambda: f64, x: &[f64]) -> f64 {
    let mut val = 0.0;
    for (i, bi) in b.iter().enumerate() {
        let mut ax = 0.0;
        for (j, xj) in x.iter().enumerate() {
            ax += a.get(i, j) * xj;
        }
        val += 0.5 * (ax - bi) * (ax - bi);
    }
    val + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
}

/// Global minimizer of `½‖Ax − b‖² + λ‖x‖₁` by exhaustive search.
pub fn brute_force_solve(a: &DenseMatrix, b: &[f64], lambda: f64) -> Result<OracleResult, OracleError> {
    let (k, n) = (a.rows(), a.cols());
    if n > MAX_VARIABLES {
        return Err(OracleError::TooLarge(n));
    }
    if b.len() != k {
        return Err(OracleError::DimensionMismatch { expected: k, got: b.len() });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(OracleError::InvalidLambda(lambda));
    }

    // G = AᵀA, c = Aᵀb
    let mut g = vec![0.0; n * n];
    let mut c = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = (0..k).map(|r| a.get(r, i) * a.get(r, j)).sum();
        }
        c[i] = (0..k).map(|r| a.get(r, i) * b[r]).sum();
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        let obj = objective(a, b, lambda, &x);
        let better = match &best {
            None => true,
            Some((bo, bx)) => obj < *bo || (obj == *bo && x < *bx),
        };
        if better {
            best = Some((obj, x));
        }
    };

    // gradient of the smooth part at x restricted to index i: (Gx − c)_i
    let grad_at = |x_s: &[f64], support: &[usize], i: usize| -> f64 {
        support.iter().zip(x_s).map(|(&j, xj)| g[i * n + j] * xj).sum::<f64>() - c[i]
    };

    if c.iter().all(|ci| ci.abs() <= lambda + KKT_SLACK) {
        consider(vec![0.0; n]);
    }
    let mut x_s = Vec::with_capacity(n);
    for size in 1..=n.min(k) {
        for_each_subset(n, size, |support| {
            let Some(chol) = SmallCholesky::factor(&g, n, support) else {
                return;
            };
            let mut in_support = vec![false; n];
            support.iter().for_each(|&i| in_support[i] = true);
            for mask in 0u32..(1u32 << size) {
                let sign = |p: usize| if mask >> (size - 1 - p) & 1 == 1 { -1.0 } else { 1.0 };
                x_s.clear();
                x_s.extend(support.iter().enumerate().map(|(p, &i)| c[i] - lambda * sign(p)));
                chol.solve(&mut x_s);
                if x_s.iter().enumerate().any(|(p, v)| !(v * sign(p) > 0.0)) {
                    continue;
                }
                let ok = (0..n)
                    .filter(|&i| !in_support[i])
                    .all(|i| grad_at(&x_s, support, i).abs() <= lambda + KKT_SLACK);
                if ok {
                    let mut x = vec![0.0; n];
                    for (&i, &v) in support.iter().zip(&x_s) {
                        x[i] = v;
                    }
                    consider(x);
                }
            }
        });
    }

    let (obj, x_hat) = best.ok_or(OracleError::NoSolutionFound)?;
    let support: Vec<usize> = (0..n).filter(|&i| x_hat[i] != 0.0).collect();
    let x_s: Vec<f64> = support.iter().map(|&i| x_hat[i]).collect();
    let kkt_residual = (0..n)
        .map(|i| {
            let gi = grad_at(&x_s, &support, i);
            if x_hat[i] > 0.0 {
                (gi + lambda).abs()
            } else if x_hat[i] < 0.0 {
                (gi - lambda).abs()
            } else {
                (gi.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max);
    let signs = x_hat
        .iter()
        .map(|&v| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 })
        .collect();
    Ok(OracleResult {
        x_hat,
        signs,
        kkt_residual,
        objective: obj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_in_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        for_each_subset(5, 5, |_| count += 1);
        assert_eq!(count, 1);
        let mut count = 0;
        for_each_subset(6, 1, |_| count += 1);
        assert_eq!(count, 6);
    }

    #[test]
    fn identity_soft_threshold() {
        let r = brute_force_solve(&DenseMatrix::identity(2), &[1.1, 0.0], 0.1).unwrap();
        assert!((r.x_hat[0] - 1.0).abs() < 1e-14);
        assert_eq!(r.x_hat[1], 0.0);
        assert_eq!(r.signs, vec![1, 0]);
        assert!(r.kkt_residual < 1e-14);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, -1.0], vec![0.5, 0.0, 3.0]]).unwrap();
        let r = brute_force_solve(&a, &[0.0, 0.0], 0.3).unwrap();
        assert_eq!(r.x_hat, vec![0.0; 3]);
    }

    #[test]
    fn rejects_large_problems() {
        let a = DenseMatrix::zeros(2, 15);
        assert_eq!(brute_force_solve(&a, &[0.0, 0.0], 1.0), Err(OracleError::TooLarge(15)));
    }

    #[test]
    fn negative_entry_identity() {
        let r = brute_force_solve(&DenseMatrix::identity(3), &[0.2, -3.0, 0.45], 0.5).unwrap();
        assert_eq!(r.x_hat, vec![0.0, -2.5, 0.0]);
    }
}
