//! Dense symmetric linear algebra.
//!
//! Everything here works on small dense matrices (d up to a few hundred):
//! a cyclic Jacobi eigensolver, spectral norms, rank-k projectors and the
//! projector-difference subspace distance.

use std::ops::{AddAssign, Sub};

use crate::error::{invalid, CslError, Result};

/// Jacobi convergence threshold, relative to the Frobenius norm of the input.
pub const EIG_TOL: f64 = 1e-12;
/// Maximum number of full Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Entrywise tolerance on `BᵀB = I` accepted when building a [`Projector`].
pub const ORTHO_TOL: f64 = 1e-10;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Dense `dim × dim` symmetric matrix, stored row-major.
///
/// Every constructor leaves `a[i][j] == a[j][i]` bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("diagonal must be nonempty"));
        }
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = v;
        }
        Ok(m)
    }

    /// Builds `(A + Aᵀ)/2` from a row-major square array.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("matrix dimension must be positive"));
        }
        if data.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        let mut m = Self { dim, data };
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (m.data[i * dim + j] + m.data[j * dim + i]);
                m.data[i * dim + j] = avg;
                m.data[j * dim + i] = avg;
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(invalid("rows must form a square array"));
        }
        Self::from_row_major(dim, rows.concat())
    }

    /// `x xᵀ`.
    pub fn outer(x: &[f64]) -> Result<Self> {
        if x.is_empty() {
            return Err(invalid("vector must be nonempty"));
        }
        let mut m = Self::zeros(x.len());
        m.add_outer(x, 1.0);
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A²`, which is again symmetric.
    pub fn squared(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                // column j of A equals row j
                let v = dot(self.row(i), self.row(j));
                out.data[i * n + j] = v;
                out.data[j * n + i] = v;
            }
        }
        out
    }

    pub fn scale(&mut self, c: f64) {
        self.data.iter_mut().for_each(|v| *v *= c);
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c · x xᵀ`.
    pub fn add_outer(&mut self, x: &[f64], c: f64) {
        let n = self.dim;
        debug_assert_eq!(x.len(), n);
        for (row, &xi) in self.data.chunks_exact_mut(n).zip(x) {
            let xi = c * xi;
            row.iter_mut().zip(x).for_each(|(a, &xj)| *a += xi * xj);
        }
    }

    /// `self += ½(y zᵀ + z yᵀ)`, symmetric by construction.
    pub fn add_sym_outer(&mut self, y: &[f64], z: &[f64]) {
        let n = self.dim;
        debug_assert!(y.len() == n && z.len() == n);
        for i in 0..n {
            for j in 0..n {
                self.data[i * n + j] += 0.5 * (y[i] * z[j] + z[i] * y[j]);
            }
        }
    }

    /// `U A Uᵀ` for a square row-major `u` of the same dimension.
    pub fn conjugate(&self, u: &[f64]) -> Result<Self> {
        let n = self.dim;
        if u.len() != n * n {
            return Err(invalid("conjugating matrix has wrong shape"));
        }
        let mut ua = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                ua[i * n + j] = (0..n).map(|k| u[i * n + k] * self.data[k * n + j]).sum();
            }
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| ua[i * n + k] * u[j * n + k]).sum();
            }
        }
        Self::from_row_major(n, out)
    }

    fn check_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
    }
}

impl AddAssign<&SymmetricMatrix> for SymmetricMatrix {
    fn add_assign(&mut self, rhs: &SymmetricMatrix) {
        self.check_same_dim(rhs);
        self.data
            .iter_mut()
            .zip(&rhs.data)
            .for_each(|(a, b)| *a += b);
    }
}

impl Sub for &SymmetricMatrix {
    type Output = SymmetricMatrix;

    fn sub(self, rhs: &SymmetricMatrix) -> SymmetricMatrix {
        self.check_same_dim(rhs);
        SymmetricMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    /// Column-major: eigenvector `i` occupies `vectors[i*d..(i+1)*d]`.
    vectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.vectors[i * d..(i + 1) * d]
    }

    /// `Σ λᵢ vᵢ vᵢᵀ`.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        let mut out = SymmetricMatrix::zeros(self.dim());
        for (i, &lambda) in self.values.iter().enumerate() {
            out.add_outer(self.vector(i), lambda);
        }
        out
    }

    /// `λ_k − λ_{k+1}` for 1-based `k`.
    pub fn eigengap(&self, k: usize) -> Option<f64> {
        (k >= 1 && k < self.dim()).then(|| self.values[k - 1] - self.values[k])
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps until the off-diagonal Frobenius norm is at most
/// `EIG_TOL · ‖A‖_F`; the output is a deterministic function of the input.
pub fn eig_sym(a: &SymmetricMatrix) -> Result<EigenDecomposition> {
    if !a.is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    let n = a.dim();
    let mut w = a.data.clone();
    // row-major; eigenvectors accumulate as columns
    let mut v = SymmetricMatrix::identity(n).data;
    let tol = EIG_TOL * a.frobenius_norm();

    let mut sweeps = 0;
    while off_diagonal_norm(&w, n) > tol {
        if sweeps == MAX_SWEEPS {
            return Err(CslError::NumericalFailure(format!(
                "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = w[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = w[p * n + p];
                let aqq = w[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;

                for k in 0..n {
                    let akp = w[k * n + p];
                    let akq = w[k * n + q];
                    w[k * n + p] = c * akp - s * akq;
                    w[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = w[p * n + k];
                    let aqk = w[q * n + k];
                    w[p * n + k] = c * apk - s * aqk;
                    w[q * n + k] = s * apk + c * aqk;
                }
                w[p * n + p] = app - t * apq;
                w[q * n + q] = aqq + t * apq;
                w[p * n + q] = 0.0;
                w[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their diagonal order
    order.sort_by(|&i, &j| w[j * n + j].total_cmp(&w[i * n + i]));

    let values = order.iter().map(|&i| w[i * n + i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &col in &order {
        vectors.extend((0..n).map(|r| v[r * n + col]));
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Largest absolute eigenvalue, i.e. the spectral norm of a symmetric matrix.
pub fn spectral_norm(a: &SymmetricMatrix) -> Result<f64> {
    let e = eig_sym(a)?;
    Ok(e.values.iter().fold(0.0, |acc: f64, v| acc.max(v.abs())))
}

/// Orthogonal projector of rank `rank` on ℝ^`dim`, held as an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    dim: usize,
    rank: usize,
    /// Column-major `dim × rank`.
    basis: Vec<f64>,
}

impl Projector {
    /// Wraps a column-major basis, checking `BᵀB = I` within [`ORTHO_TOL`].
    pub fn from_orthonormal(dim: usize, rank: usize, basis: Vec<f64>) -> Result<Self> {
        if dim == 0 || rank > dim {
            return Err(invalid(format!("invalid projector shape {dim}x{rank}")));
        }
        if basis.len() != dim * rank {
            return Err(invalid("basis length does not match shape"));
        }
        let p = Self { dim, rank, basis };
        for i in 0..rank {
            for j in 0..=i {
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot(p.column(i), p.column(j)) - target).abs() > ORTHO_TOL {
                    return Err(invalid("basis columns are not orthonormal"));
                }
            }
        }
        Ok(p)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            rank: dim,
            basis: SymmetricMatrix::identity(dim).data,
        }
    }

    pub(crate) fn from_raw(dim: usize, rank: usize, basis: Vec<f64>) -> Self {
        debug_assert_eq!(basis.len(), dim * rank);
        Self { dim, rank, basis }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.basis[j * self.dim..(j + 1) * self.dim]
    }

    pub fn basis(&self) -> &[f64] {
        &self.basis
    }

    /// `P = B Bᵀ`.
    pub fn matrix(&self) -> SymmetricMatrix {
        let mut m = SymmetricMatrix::zeros(self.dim);
        for j in 0..self.rank {
            m.add_outer(self.column(j), 1.0);
        }
        m
    }

    /// `P x = B (Bᵀ x)`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for j in 0..self.rank {
            let col = self.column(j);
            let coef = dot(col, x);
            out.iter_mut().zip(col).for_each(|(o, c)| *o += coef * c);
        }
        out
    }

    /// Same subspace, basis replaced by `B R` for a row-major `rank × rank` matrix `R`.
    pub fn rebased(&self, r: &[f64]) -> Result<Self> {
        let k = self.rank;
        if r.len() != k * k {
            return Err(invalid("rotation has wrong shape"));
        }
        let mut basis = vec![0.0; self.dim * k];
        for j in 0..k {
            for i in 0..k {
                let rij = r[i * k + j];
                let src = self.column(i);
                for (b, s) in basis[j * self.dim..(j + 1) * self.dim].iter_mut().zip(src) {
                    *b += rij * s;
                }
            }
        }
        Self::from_orthonormal(self.dim, k, basis)
    }
}

/// Projector onto the span of the `k` leading eigenvectors.
pub fn top_k_projector(e: &EigenDecomposition, k: usize) -> Result<Projector> {
    let d = e.dim();
    if k == 0 || k > d {
        return Err(invalid(format!("k = {k} out of range 1..={d}")));
    }
    Ok(Projector::from_raw(d, k, e.vectors[..d * k].to_vec()))
}

/// `‖P − Q‖₂`, the sine of the largest principal angle, clamped to `[0, 1]`.
pub fn subspace_distance(p: &Projector, q: &Projector) -> Result<f64> {
    if p.dim != q.dim || p.rank != q.rank {
        return Err(invalid(format!(
            "projector shapes differ: {}x{} vs {}x{}",
            p.dim, p.rank, q.dim, q.rank
        )));
    }
    let diff = &p.matrix() - &q.matrix();
    Ok(spectral_norm(&diff)?.clamp(0.0, 1.0))
}

/// Dense `d × n` data matrix with columns stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    d: usize,
    n: usize,
    data: Vec<f64>,
}

impl DataMatrix {
    /// Column-major data: column `t` is `data[t*d..(t+1)*d]`.
    pub fn new(d: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(invalid("data matrix must have positive dimensions"));
        }
        if data.len() != d * n {
            return Err(invalid("data length does not match d*n"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("data has non-finite entries"));
        }
        Ok(Self { d, n, data })
    }

    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let d = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != d) {
            return Err(invalid("columns have unequal lengths"));
        }
        Self::new(d, cols.len(), cols.concat())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_cols(&self) -> usize {
        self.n
    }

    pub fn column(&self, t: usize) -> &[f64] {
        &self.data[t * self.d..(t + 1) * self.d]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            d: self.d,
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Columns reordered so that new column `i` is old column `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(invalid("permutation length mismatch"));
        }
        let cols: Vec<Vec<f64>> = perm.iter().map(|&t| self.column(t).to_vec()).collect();
        Self::from_columns(&cols)
    }

    /// `U X` for a row-major `d × d` matrix `U`.
    pub fn left_multiplied(&self, u: &[f64]) -> Result<Self> {
        let d = self.d;
        if u.len() != d * d {
            return Err(invalid("left factor has wrong shape"));
        }
        let mut data = Vec::with_capacity(self.data.len());
        for col in self.columns() {
            data.extend((0..d).map(|i| dot(&u[i * d..(i + 1) * d], col)));
        }
        Self::new(d, self.n, data)
    }

    /// `max_t ‖x_t‖²`.
    pub fn max_sq_norm(&self) -> f64 {
        self.columns().map(|c| dot(c, c)).fold(0.0, f64::max)
    }

    /// `(1/n) X Xᵀ`.
    pub fn covariance(&self) -> SymmetricMatrix {
        let mut s = SymmetricMatrix::zeros(self.d);
        for col in self.columns() {
            s.add_outer(col, 1.0);
        }
        s.scale(1.0 / self.n as f64);
        s
    }

    /// `‖X − P X‖_F`.
    pub fn residual_norm(&self, p: &Projector) -> f64 {
        self.columns()
            .map(|c| {
                let pc = p.apply(c);
                c.iter().zip(&pc).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    }
}
