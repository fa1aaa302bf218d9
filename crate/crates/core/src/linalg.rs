//! Dense linear-algebra kernels.
//!
//! Everything here works on row-major `f64` storage. The heavy lifting is a
//! Householder QR with column pivoting, which gives both the orthogonal
//! projector onto the row space of a matrix and minimum-norm solutions of
//! `Aᵀy = w`.

use thiserror::Error;

/// Relative cutoff on the R diagonal below which a pivot counts as zero.
pub const RANK_TOL: f64 = 1e-12;
/// Iteration cap for [`op_norm`].
pub const POWER_MAX_ITER: usize = 10_000;
/// Default relative tolerance for [`op_norm`].
pub const POWER_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("expected {expected} entries, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator norm of a zero matrix requested")]
    ZeroMatrix,
    #[error("power iteration did not reach tolerance after {iterations} iterations (last relative change {change:e})")]
    PowerIterationStalled { iterations: usize, change: f64 },
    #[error("matrix is not positive definite (pivot {index})")]
    NotPositiveDefinite { index: usize },
}

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DataLength {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data: t,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Keeps the rows listed in `idx`, in that order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec_into(x, &mut out);
        out
    }

    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "matvec: input length");
        assert_eq!(out.len(), self.rows, "matvec: output length");
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    /// `Aᵀ u`
    pub fn t_matvec(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.t_matvec_into(u, &mut out);
        out
    }

    pub fn t_matvec_into(&self, u: &[f64], out: &mut [f64]) {
        assert_eq!(u.len(), self.rows, "t_matvec: input length");
        assert_eq!(out.len(), self.cols, "t_matvec: output length");
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &ui) in u.iter().enumerate() {
            if ui != 0.0 {
                axpy(ui, self.row(i), out);
            }
        }
    }

    /// `A Aᵀ`, a `rows × rows` symmetric matrix.
    pub fn gram_rows(&self) -> Self {
        let k = self.rows;
        let mut g = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..=i {
                let v = dot(self.row(i), self.row(j));
                g[i * k + j] = v;
                g[j * k + i] = v;
            }
        }
        Self {
            rows: k,
            cols: k,
            data: g,
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimension");
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(l), orow);
                }
            }
        }
        Self {
            rows: self.rows,
            cols: other.cols,
            data: out,
        }
    }

    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Householder QR of an `m × n` matrix kept in column-major order.
/// Reflector `j` is `I - tau_j v vᵀ` with `v_j = 1` and the tail stored
/// below the diagonal.
struct HouseholderQr {
    m: usize,
    n: usize,
    a: Vec<f64>,
    tau: Vec<f64>,
    perm: Vec<usize>,
}

impl HouseholderQr {
    fn factor(mut a: Vec<f64>, m: usize, n: usize, pivot: bool) -> Self {
        let steps = m.min(n);
        let mut tau = vec![0.0; steps];
        let mut perm: Vec<usize> = (0..n).collect();
        for j in 0..steps {
            if pivot {
                let mut best = j;
                let mut best_norm = -1.0;
                for c in j..n {
                    let col = &a[c * m + j..(c + 1) * m];
                    let nrm = dot(col, col);
                    if nrm > best_norm {
                        best_norm = nrm;
                        best = c;
                    }
                }
                if best != j {
                    for i in 0..m {
                        a.swap(j * m + i, best * m + i);
                    }
                    perm.swap(j, best);
                }
            }
            let (head, tail) = a.split_at_mut((j + 1) * m);
            let col = &mut head[j * m..];
            let alpha = col[j];
            let xnorm = norm2(&col[j + 1..]);
            if xnorm == 0.0 {
                tau[j] = 0.0;
                continue;
            }
            let beta = -alpha.signum() * alpha.hypot(xnorm);
            let beta = if beta == 0.0 { -xnorm } else { beta };
            tau[j] = (beta - alpha) / beta;
            let scale = 1.0 / (alpha - beta);
            col[j + 1..].iter_mut().for_each(|v| *v *= scale);
            col[j] = beta;
            let v = &col[j..];
            for c in 0..n - j - 1 {
                let target = &mut tail[c * m + j..(c + 1) * m];
                let s = target[0] + dot(&v[1..], &target[1..]);
                let f = tau[j] * s;
                target[0] -= f;
                axpy(-f, &v[1..], &mut target[1..]);
            }
        }
        Self { m, n, a, tau, perm }
    }

    #[inline]
    fn r(&self, i: usize, j: usize) -> f64 {
        self.a[j * self.m + i]
    }

    fn numerical_rank(&self) -> usize {
        let steps = self.m.min(self.n);
        let rmax = (0..steps).fold(0.0f64, |acc, i| acc.max(self.r(i, i).abs()));
        if rmax == 0.0 {
            return 0;
        }
        (0..steps)
            .take_while(|&i| self.r(i, i).abs() > RANK_TOL * rmax)
            .count()
    }

    /// First `r` columns of Q, returned row-major `m × r`.
    fn thin_q(&self, r: usize) -> Vec<f64> {
        let m = self.m;
        // column-major work array, then transposed at the end
        let mut q = vec![0.0; m * r];
        for i in 0..r {
            q[i * m + i] = 1.0;
        }
        for j in (0..r).rev() {
            let t = self.tau[j];
            if t == 0.0 {
                continue;
            }
            let v_tail = &self.a[j * m + j + 1..(j + 1) * m];
            for c in j..r {
                let col = &mut q[c * m + j..(c + 1) * m];
                let s = col[0] + dot(v_tail, &col[1..]);
                let f = t * s;
                col[0] -= f;
                axpy(-f, v_tail, &mut col[1..]);
            }
        }
        let mut out = vec![0.0; m * r];
        for c in 0..r {
            for i in 0..m {
                out[i * r + c] = q[c * m + i];
            }
        }
        out
    }
}

/// Orthogonal projector onto the row space `rg Aᵀ` of a `k × n` matrix,
/// together with the pivoted factorization `Aᵀ Π = Q R` it was built from.
#[derive(Debug, Clone)]
pub struct RangeProjector {
    k: usize,
    n: usize,
    rank: usize,
    /// Row-major `n × rank`, orthonormal columns.
    basis: Vec<f64>,
    /// Leading `rank × k` block of R, row-major.
    r_top: Vec<f64>,
    perm: Vec<usize>,
    /// For rank-deficient factors: `R_topᵀ = Z S`, Z row-major `k × rank`,
    /// S row-major `rank × rank` upper triangular.
    cod: Option<(Vec<f64>, Vec<f64>)>,
}

impl RangeProjector {
    pub fn new(a: &DenseMatrix) -> Self {
        let (k, n) = (a.rows(), a.cols());
        // Aᵀ in column-major order is A in row-major order.
        let qr = HouseholderQr::factor(a.data().to_vec(), n, k, true);
        let rank = qr.numerical_rank();
        let basis = qr.thin_q(rank);
        let mut r_top = vec![0.0; rank * k];
        for i in 0..rank {
            for j in i..k {
                r_top[i * k + j] = qr.r(i, j);
            }
        }
        let cod = (rank > 0 && rank < k).then(|| {
            // R_topᵀ is k × rank; column-major storage of it is R_top row-major.
            let inner = HouseholderQr::factor(r_top.clone(), k, rank, false);
            let z = inner.thin_q(rank);
            let mut s = vec![0.0; rank * rank];
            for i in 0..rank {
                for j in i..rank {
                    s[i * rank + j] = inner.r(i, j);
                }
            }
            (z, s)
        });
        Self {
            k,
            n,
            rank,
            basis,
            r_top,
            perm: qr.perm,
            cod,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `(k, n)` of the source matrix.
    pub fn dims(&self) -> (usize, usize) {
        (self.k, self.n)
    }

    /// Orthonormal basis of `rg Aᵀ` as an `n × rank` matrix (`None` when A is zero).
    pub fn basis(&self) -> Option<DenseMatrix> {
        (self.rank > 0).then(|| DenseMatrix {
            rows: self.n,
            cols: self.rank,
            data: self.basis.clone(),
        })
    }

    /// `Q₁ᵀ v`
    fn coefficients(&self, v: &[f64]) -> Vec<f64> {
        let r = self.rank;
        let mut c = vec![0.0; r];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                axpy(vi, &self.basis[i * r..(i + 1) * r], &mut c);
            }
        }
        c
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.project_into(v, &mut out);
        out
    }

    pub fn project_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n, "project: input length");
        let r = self.rank;
        let c = self.coefficients(v);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(&self.basis[i * r..(i + 1) * r], &c);
        }
    }

    /// Minimum-norm least-squares solution of `Aᵀ y = w`.
    pub fn solve_transpose(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.n, "solve_transpose: input length");
        let (k, r) = (self.k, self.rank);
        let mut y = vec![0.0; k];
        if r == 0 {
            return y;
        }
        let c = self.coefficients(w);
        let mut u = vec![0.0; k];
        match &self.cod {
            None => {
                // square upper-triangular back substitution
                for i in (0..r).rev() {
                    let row = &self.r_top[i * k..(i + 1) * k];
                    let s = c[i] - dot(&row[i + 1..r], &u[i + 1..r]);
                    u[i] = s / row[i];
                }
            }
            Some((z, s)) => {
                // Sᵀ t = c (forward substitution), then u = Z t
                let mut t = vec![0.0; r];
                for i in 0..r {
                    let mut acc = c[i];
                    for l in 0..i {
                        acc -= s[l * r + i] * t[l];
                    }
                    t[i] = acc / s[i * r + i];
                }
                for (j, uj) in u.iter_mut().enumerate() {
                    *uj = dot(&z[j * r..(j + 1) * r], &t);
                }
            }
        }
        for (j, &p) in self.perm.iter().enumerate() {
            y[p] = u[j];
        }
        y
    }
}

/// Builds the orthogonal projector onto `rg Aᵀ`.
pub fn qr_range_projector(a: &DenseMatrix) -> RangeProjector {
    RangeProjector::new(a)
}

/// Minimum-norm least-squares solution of `Aᵀ y = w` and `‖Aᵀy − w‖_∞`.
pub fn lstsq_transpose(a: &DenseMatrix, w: &[f64]) -> (Vec<f64>, f64) {
    let proj = RangeProjector::new(a);
    let y = proj.solve_transpose(w);
    let res = norm_inf(&sub(&a.t_matvec(&y), w));
    (y, res)
}

/// Orthonormal factor Q of a square matrix via unpivoted Householder QR.
pub fn orthonormal_factor(a: &DenseMatrix) -> DenseMatrix {
    let (m, n) = (a.rows(), a.cols());
    let qr = HouseholderQr::factor(a.transpose().into_data(), m, n, false);
    let r = m.min(n);
    DenseMatrix {
        rows: m,
        cols: r,
        data: qr.thin_q(r),
    }
}

/// Largest eigenvalue of a symmetric positive semidefinite operator by
/// power iteration from the normalized all-ones vector.
pub fn power_iteration(
    dim: usize,
    tol: f64,
    max_iter: usize,
    mut apply: impl FnMut(&[f64], &mut [f64]),
) -> Result<f64, LinalgError> {
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut av = vec![0.0; dim];
    let mut est = 0.0f64;
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        apply(&v, &mut av);
        let next = dot(&v, &av);
        let nrm = norm2(&av);
        if nrm == 0.0 {
            return Err(LinalgError::ZeroMatrix);
        }
        change = (next - est).abs() / next.abs().max(f64::MIN_POSITIVE);
        est = next;
        for (vi, ai) in v.iter_mut().zip(&av) {
            *vi = ai / nrm;
        }
        if change <= tol {
            return Ok(est);
        }
    }
    Err(LinalgError::PowerIterationStalled {
        iterations: max_iter,
        change,
    })
}

/// Spectral norm `σ_max(A)` via power iteration on `AᵀA`.
pub fn op_norm(a: &DenseMatrix, tol: f64) -> Result<f64, LinalgError> {
    if a.max_abs() == 0.0 {
        return Err(LinalgError::ZeroMatrix);
    }
    let mut tmp = vec![0.0; a.rows()];
    let lambda = power_iteration(a.cols(), tol, POWER_MAX_ITER, |v, out| {
        a.matvec_into(v, &mut tmp);
        a.t_matvec_into(&tmp, out);
    })?;
    Ok(lambda.sqrt())
}

/// Orthonormal DCT-II matrix: `M[i][j] = c_i cos(π i (2j+1) / 2n)`.
pub fn dct_matrix(n: usize) -> DenseMatrix {
    assert!(n >= 1, "dct_matrix: n must be positive");
    let nf = n as f64;
    let c0 = (1.0 / nf).sqrt();
    let c = (2.0 / nf).sqrt();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        if i == 0 {
            data.extend(std::iter::repeat_n(c0, n));
            continue;
        }
        for j in 0..n {
            let arg = std::f64::consts::PI * (i as f64) * (2 * j + 1) as f64 / (2.0 * nf);
            data.push(c * arg.cos());
        }
    }
    DenseMatrix {
        rows: n,
        cols: n,
        data,
    }
}

/// Cholesky factor `L` of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self, LinalgError> {
        let n = a.rows();
        if a.cols() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                got: a.cols(),
            });
        }
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let d = a.get(j, j) - dot(&l[j * n..j * n + j], &l[j * n..j * n + j]);
            if d <= 0.0 || !d.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { index: j });
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let s = a.get(i, j) - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                l[i * n + j] = s / d;
            }
        }
        Ok(Self { n, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let s = x[i] - dot(&self.l[i * n..i * n + i], &x[..i]);
            x[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.l[j * n + i] * x[j];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut s = seed;
        let data = (0..rows * cols)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            DenseMatrix::new(0, 2, vec![]),
            Err(LinalgError::EmptyMatrix { .. })
        ));
        assert!(matches!(
            DenseMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(LinalgError::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            DenseMatrix::new(2, 2, vec![1.0]),
            Err(LinalgError::DataLength { .. })
        ));
    }

    #[test]
    fn identity_projector() {
        let p = qr_range_projector(&DenseMatrix::identity(3));
        assert_eq!(p.rank(), 3);
        let v = [0.3, -2.0, 5.0];
        let pv = p.project(&v);
        for (a, b) in pv.iter().zip(&v) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn single_row_projector() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0]]).unwrap();
        let p = qr_range_projector(&a);
        assert_eq!(p.rank(), 1);
        let pv = p.project(&[2.0, 3.0, -4.0]);
        assert!((pv[0] - 2.0).abs() < 1e-15 && pv[1].abs() < 1e-15 && pv[2].abs() < 1e-15);
    }

    #[test]
    fn basis_is_orthonormal() {
        let a = lcg_matrix(7, 15, 3);
        let q = qr_range_projector(&a).basis().unwrap();
        let qtq = q.transpose().matmul(&q);
        let dev = sub(qtq.data(), DenseMatrix::identity(7).data());
        assert!(norm_inf(&dev) <= 1e-12);
    }

    #[test]
    fn rank_deficient_minimum_norm() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let (y, res) = lstsq_transpose(&a, &[4.0, 0.0]);
        assert_eq!(qr_range_projector(&a).rank(), 1);
        assert!((y[0] - 2.0).abs() < 1e-15 && y[1].abs() < 1e-15);
        assert!(res < 1e-15);
    }

    #[test]
    fn lstsq_identity() {
        let (y, res) = lstsq_transpose(&DenseMatrix::identity(2), &[1.0, -1.0]);
        assert_eq!(y, vec![1.0, -1.0]);
        assert_eq!(res, 0.0);
    }

    #[test]
    fn rank_deficient_wide_matches_projection() {
        // rank 2, k = 3, n = 5: third row is a combination of the first two
        let base = lcg_matrix(2, 5, 9);
        let mut rows: Vec<Vec<f64>> = (0..2).map(|i| base.row(i).to_vec()).collect();
        rows.push(base.row(0).iter().zip(base.row(1)).map(|(a, b)| a - 2.0 * b).collect());
        let a = DenseMatrix::from_rows(&rows).unwrap();
        let p = qr_range_projector(&a);
        assert_eq!(p.rank(), 2);
        let w = [0.4, -1.0, 0.7, 0.1, 2.0];
        let y = p.solve_transpose(&w);
        let aty = a.t_matvec(&y);
        assert!(norm_inf(&sub(&aty, &p.project(&w))) < 1e-12);
        // minimum norm: y lies in rg A, orthogonal to the null vector (1, -2, -1)
        let null = [1.0, -2.0, -1.0];
        assert!(dot(&y, &null).abs() < 1e-12);
    }

    #[test]
    fn op_norm_diag_and_identity() {
        let n = op_norm(&DenseMatrix::diag(&[3.0, 1.0]), POWER_TOL).unwrap();
        assert!((n - 3.0).abs() < 1e-8);
        let n = op_norm(&DenseMatrix::identity(5), POWER_TOL).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
        assert_eq!(
            op_norm(&DenseMatrix::zeros(2, 2), POWER_TOL),
            Err(LinalgError::ZeroMatrix)
        );
    }

    #[test]
    fn dct_small_cases() {
        assert_eq!(dct_matrix(1).data(), &[1.0]);
        let m = dct_matrix(8);
        for j in 0..8 {
            assert!((m.get(0, j) - 0.353_553_390_593_273_8).abs() < 1e-15);
        }
        for n in 1..=64 {
            let m = dct_matrix(n);
            let mtm = m.transpose().matmul(&m);
            let dev = sub(mtm.data(), DenseMatrix::identity(n).data());
            assert!(norm_inf(&dev) <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn cholesky_solves() {
        let b = lcg_matrix(4, 6, 1);
        let g = b.gram_rows();
        let ch = Cholesky::factor(&g).unwrap();
        let rhs = [1.0, 2.0, -1.0, 0.5];
        let x = ch.solve(&rhs);
        assert!(norm_inf(&sub(&g.matvec(&x), &rhs)) < 1e-12);
        assert!(Cholesky::factor(&DenseMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn orthonormal_factor_square() {
        let q = orthonormal_factor(&lcg_matrix(6, 6, 4));
        let qtq = q.transpose().matmul(&q);
        assert!(norm_inf(&sub(qtq.data(), DenseMatrix::identity(6).data())) < 1e-13);
    }
}
