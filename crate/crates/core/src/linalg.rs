//! Dense linear algebra for the selection pipelines.
//!
//! Everything here is small and dense: covariance matrices of a few hundred
//! columns, Gauss-Newton Hessians of a few thousand parameters at most. The
//! symmetric eigensolver is cyclic Jacobi; SPD systems go through Cholesky.

use crate::error::{Error, Result};
use std::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on a zero chunk size
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok(self.row_iter().map(|r| dot(r, x)).collect())
    }

    /// Copies the listed columns, in the listed order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.cols) {
            return Err(Error::KExceedsDimension {
                k: bad + 1,
                dim: self.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, indices.len());
        for i in 0..self.rows {
            let src = self.row(i);
            for (o, &j) in out.row_mut(i).iter_mut().zip(indices) {
                *o = src[j];
            }
        }
        Ok(out)
    }

    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for r in self.row_iter() {
            for (m, &v) in means.iter_mut().zip(r) {
                *m += v;
            }
        }
        let n = self.rows.max(1) as f64;
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Square matrix whose entries are symmetric within `SYMMETRY_TOL` (relative).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

pub const SYMMETRY_TOL: f64 = 1e-12;

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::DimensionMismatch {
                expected: m.rows,
                got: m.cols,
            });
        }
        if !m.is_finite() {
            return Err(Error::InvalidData("matrix has non-finite entries".into()));
        }
        let scale = m.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for i in 0..m.rows {
            for j in (i + 1)..m.cols {
                let diff = (m[(i, j)] - m[(j, i)]).abs();
                if diff > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(SymMatrix(m))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        SymMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        SymMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)]).sum()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Adds `values[i]` to diagonal entry i.
    pub fn add_diagonal(&mut self, values: &[f64]) {
        for (i, &v) in values.iter().enumerate() {
            self.0[(i, i)] += v;
        }
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Sample covariance (N-1 denominator) of the columns of `data`.
pub fn covariance(data: &Matrix) -> Result<SymMatrix> {
    let (n, d) = (data.rows(), data.cols());
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    if !data.is_finite() {
        return Err(Error::InvalidData("non-finite entry in data".into()));
    }
    let means = data.column_means();
    // centered columns, stored contiguously so the pair sums are slice dots
    let mut centered = vec![0.0; d * n];
    for (i, r) in data.row_iter().enumerate() {
        for j in 0..d {
            centered[j * n + i] = r[j] - means[j];
        }
    }
    let denom = (n - 1) as f64;
    let mut cov = Matrix::zeros(d, d);
    for a in 0..d {
        let ca = &centered[a * n..(a + 1) * n];
        for b in a..d {
            let v = dot(ca, &centered[b * n..(b + 1) * n]) / denom;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    Ok(SymMatrix(cov))
}

/// Eigenpairs of a symmetric matrix, values descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// Column c pairs with `values[c]`.
    pub vectors: Matrix,
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Each eigenvector is signed so its largest-magnitude component is positive
/// (first such index wins a tie), which makes results reproducible.
pub fn sym_eig(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.dim();
    let mut a = m.0.clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal_norm(&a) < JACOBI_TOL * scale {
            converged = true;
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        return Err(Error::EigDivergence { sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps lower index first among equal eigenvalues
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (c, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        canonical_sign(&mut col);
        for (r, x) in col.into_iter().enumerate() {
            vectors[(r, c)] = x;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Applies A <- Jᵀ A J and V <- V J for the plane rotation on (p, q).
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn canonical_sign(col: &mut [f64]) {
    let max = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let lead = col
        .iter()
        .position(|x| x.abs() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    if col[lead] < 0.0 {
        col.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Lower Cholesky factor of an SPD matrix, row-major.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
    /// Diagonal damping that was added to make the factorization succeed.
    pub damping: f64,
}

impl Cholesky {
    /// Factors `m`; on failure retries once with damping `1e-10 * trace / dim`.
    pub fn factor(m: &SymMatrix) -> Result<Self> {
        match Self::factor_with(m, 0.0) {
            Ok(c) => Ok(c),
            Err(_) => {
                let n = m.dim().max(1) as f64;
                let damping = 1e-10 * m.trace().abs() / n;
                Self::factor_with(m, damping)
            }
        }
    }

    fn factor_with(m: &SymMatrix, damping: f64) -> Result<Self> {
        let n = m.dim();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s = m[(i, j)] - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                if i == j {
                    let d = s + damping;
                    if !(d > 0.0) || !d.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: d });
                    }
                    l[i * n + i] = d.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, l, damping })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves L z = b.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z = vec![0.0; n];
        for i in 0..n {
            let s = b[i] - dot(&self.l[i * n..i * n + i], &z[..i]);
            z[i] = s / self.l[i * n + i];
        }
        z
    }

    /// Solves (L Lᵀ) x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = self.forward(b);
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }

    /// Diagonal of the inverse, from the columns of L⁻¹.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        let mut x = vec![0.0; n];
        for j in 0..n {
            // column j of L⁻¹ is zero above row j
            x[j] = 1.0 / self.l[j * n + j];
            for i in (j + 1)..n {
                let s = dot(&self.l[i * n + j..i * n + i], &x[j..i]);
                x[i] = -s / self.l[i * n + i];
            }
            out[j] = x[j..].iter().map(|v| v * v).sum();
        }
        out
    }
}

/// Solves an SPD system through Cholesky (with one damped retry).
pub fn solve_spd(m: &SymMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: rhs.len(),
        });
    }
    Ok(Cholesky::factor(m)?.solve(rhs))
}

/// Least-squares coefficients of `y ≈ design · beta` via the normal equations.
pub fn least_squares(design: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    ridge_least_squares(design, y, 0.0)
}

/// Least squares with `ridge · trace(XᵀX) / p` added to the normal-equation
/// diagonal.
pub fn ridge_least_squares(design: &Matrix, y: &[f64], ridge: f64) -> Result<Vec<f64>> {
    if design.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: design.rows(),
            got: y.len(),
        });
    }
    let p = design.cols();
    let mut gram = Matrix::zeros(p, p);
    let mut rhs = vec![0.0; p];
    for (r, &yi) in design.row_iter().zip(y) {
        for a in 0..p {
            rhs[a] += r[a] * yi;
            for b in a..p {
                gram[(a, b)] += r[a] * r[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    let mut gram = SymMatrix(gram);
    if ridge > 0.0 {
        let shift = ridge * gram.trace() / p as f64;
        gram.add_diagonal(&vec![shift; p]);
    }
    solve_spd(&gram, &rhs)
}
