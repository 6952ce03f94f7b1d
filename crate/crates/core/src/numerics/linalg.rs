//! Small dense vectors and matrices.
//!
//! Everything here is sized for desk-scale geometry (dimensions up to a few
//! dozen), so the storage is plain row-major `Vec<f64>` and the algorithms are
//! the textbook ones: partial-pivot LU, modified Gram-Schmidt with
//! re-orthogonalization, one-sided Jacobi for singular values.

use std::fmt;
use std::ops::{Add, Deref, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which a column is considered dependent.
pub const RANK_TOL: f64 = 1e-12;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A point or direction in R^n with finite coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::BadDims("empty vector".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Vector(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector of R^dim.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn normalized(&self) -> Result<Vector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn axpy(&mut self, a: f64, x: &[f64]) {
        for (y, xi) in self.0.iter_mut().zip(x) {
            *y += a * xi;
        }
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        debug_assert!(v.iter().all(|x| x.is_finite()), "non-finite vector");
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector::from(v.to_vec())
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::BadDims(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::BadDims("ragged rows".into()));
        }
        Matrix::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn from_cols(cols: &[&[f64]]) -> Result<Self> {
        let rows = cols.first().map_or(0, |c| c.len());
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::BadDims("ragged columns".into()));
        }
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        if m.data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vector {
        Vector((0..self.rows).map(|r| self[(r, c)]).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dims(self.cols, other.rows));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::dims(self.cols, x.len()));
        }
        Ok(Vector((0..self.rows).map(|r| dot(self.row(r), x)).collect()))
    }

    /// `Mᵀ x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Result<Vector> {
        if x.len() != self.rows {
            return Err(Error::dims(self.rows, x.len()));
        }
        let mut out = vec![0.0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o += m * xr;
            }
        }
        Ok(Vector(out))
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `‖MᵀM − I‖_max`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.cols {
            for b in a..self.cols {
                let s: f64 = (0..self.rows).map(|r| self[(r, a)] * self[(r, b)]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    pub fn is_orthonormal_columns(&self, tol: f64) -> bool {
        self.orthonormality_defect() <= tol
    }

    /// Determinant by partial-pivot LU.
    pub fn det(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::BadDims("determinant of a non-square matrix".into()));
        }
        let mut a = self.data.clone();
        Ok(det_in_place(&mut a, self.rows))
    }

    /// Solve `M x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vector> {
        let inv = self.inverse()?;
        inv.mul_vec(b)
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::BadDims("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        let scale = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return Err(Error::SingularTransform);
        }
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
                .expect("nonempty range");
            if a[p * n + c].abs() <= 1e-14 * scale {
                return Err(Error::SingularTransform);
            }
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                    inv.swap(p * n + j, c * n + j);
                }
            }
            let d = a[c * n + c];
            for j in 0..n {
                a[c * n + j] /= d;
                inv[c * n + j] /= d;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[r * n + c];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[c * n + j];
                    inv[r * n + j] -= f * inv[c * n + j];
                }
            }
        }
        Ok(Matrix { rows: n, cols: n, data: inv })
    }

    /// Singular values in decreasing order (one-sided Jacobi).
    pub fn singular_values(&self) -> Vec<f64> {
        // Work on the orientation with fewer columns.
        let (m, n, mut a) = if self.cols <= self.rows {
            (self.rows, self.cols, self.clone())
        } else {
            (self.cols, self.rows, self.transpose())
        };
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                    for r in 0..m {
                        let x = a[(r, p)];
                        let y = a[(r, q)];
                        alpha += x * x;
                        beta += y * y;
                        gamma += x * y;
                    }
                    if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let t = if zeta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for r in 0..m {
                        let x = a[(r, p)];
                        let y = a[(r, q)];
                        a[(r, p)] = c * x - s * y;
                        a[(r, q)] = s * x + c * y;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|r| a[(r, j)] * a[(r, j)]).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|x, y| y.total_cmp(x));
        sv
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Determinant of the `n×n` row-major matrix stored in `a` (destroyed).
pub fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let mut p = c;
        let mut best = a[c * n + c].abs();
        for r in (c + 1)..n {
            let v = a[r * n + c].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let d = a[c * n + c];
        det *= d;
        for r in (c + 1)..n {
            let f = a[r * n + c] / d;
            if f != 0.0 {
                for j in c..n {
                    a[r * n + j] -= f * a[c * n + j];
                }
            }
        }
    }
    det
}

/// Orthonormalize the columns of `m`, returning `Q` with the same column
/// span such that the implicit triangular factor `R = QᵀM` has a positive
/// diagonal.
///
/// The positive-diagonal convention makes `Q` Haar-distributed when `m` is a
/// standard Gaussian matrix.
pub fn qr_orthonormalize(m: &Matrix) -> Result<Matrix> {
    if m.cols > m.rows {
        return Err(Error::RankDeficient);
    }
    let sv = m.singular_values();
    let largest = sv.first().copied().unwrap_or(0.0);
    let smallest = sv.last().copied().unwrap_or(0.0);
    if largest == 0.0 || smallest <= RANK_TOL * largest {
        return Err(Error::RankDeficient);
    }
    let mut cols: Vec<f64> = m.transpose().data;
    if !gram_schmidt_columns(&mut cols, m.rows, m.cols) {
        return Err(Error::RankDeficient);
    }
    let mut q = Matrix::zeros(m.rows, m.cols);
    for j in 0..m.cols {
        for i in 0..m.rows {
            q[(i, j)] = cols[j * m.rows + i];
        }
    }
    Ok(q)
}

/// Modified Gram-Schmidt with one re-orthogonalization pass on `k`
/// contiguous column vectors of length `n`, in place. Returns false if a
/// column collapses.
///
/// The diagonal of the implied triangular factor is positive by
/// construction, which is the sign convention needed for Haar sampling.
pub fn gram_schmidt_columns(cols: &mut [f64], n: usize, k: usize) -> bool {
    for j in 0..k {
        let (done, rest) = cols.split_at_mut(j * n);
        let v = &mut rest[..n];
        let original = norm(v);
        if original == 0.0 {
            return false;
        }
        for _pass in 0..2 {
            for i in 0..j {
                let q = &done[i * n..(i + 1) * n];
                let r = dot(q, v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= r * qi;
                }
            }
        }
        let nv = norm(v);
        if nv <= RANK_TOL * original {
            return false;
        }
        for vi in v.iter_mut() {
            *vi /= nv;
        }
    }
    true
}

/// An orthonormal basis of `u^⊥` (as `n × (n−1)` columns) for a unit `u`,
/// obtained from the Householder reflection that maps `e_1` to `u`.
pub fn orthogonal_complement(u: &[f64]) -> Matrix {
    let n = u.len();
    // H = I - 2 w wᵀ / |w|² with w = u - e_1 (or u + e_1 for stability);
    // H e_1 = ±u, and the remaining columns of H span u^⊥.
    let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut w = u.to_vec();
    w[0] += sign;
    let ww = dot(&w, &w);
    let mut basis = Matrix::zeros(n, n - 1);
    for j in 1..n {
        for i in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            basis[(i, j - 1)] = delta - 2.0 * w[i] * w[j] / ww;
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_fixed_by_qr() {
        let q = qr_orthonormalize(&Matrix::identity(3)).unwrap();
        assert!(q.max_abs_diff(&Matrix::identity(3)) < 1e-15);
    }

    #[test]
    fn upper_triangular_input_gives_standard_basis() {
        let m = Matrix::from_cols(&[&[2.0, 0.0], &[1.0, 1.0]]).unwrap();
        let q = qr_orthonormalize(&m).unwrap();
        assert!(q.max_abs_diff(&Matrix::identity(2)) < 1e-15);
    }

    #[test]
    fn dependent_columns_are_rejected() {
        let m = Matrix::from_cols(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]).unwrap();
        assert_eq!(qr_orthonormalize(&m), Err(Error::RankDeficient));
    }

    #[test]
    fn determinant_and_inverse() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((m.det().unwrap() - 5.0).abs() < 1e-14);
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv).unwrap();
        assert!(prod.max_abs_diff(&Matrix::identity(2)) < 1e-14);
        let sing = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(sing.inverse(), Err(Error::SingularTransform));
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = Matrix::from_rows(&[vec![0.0, 3.0], vec![-2.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let sv = m.singular_values();
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal_to_u() {
        for u in [vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.6, 0.0, -0.8]] {
            let b = orthogonal_complement(&u);
            assert!(b.is_orthonormal_columns(1e-14));
            assert!(b.tr_mul_vec(&u).unwrap().norm() < 1e-14);
        }
    }
}
