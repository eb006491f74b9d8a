use std::fmt;

use crate::{Error, Result};

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
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

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
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

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| super::dot(self.row(i), x)).collect())
    }

    /// `selfᵀ y`.
    pub fn tr_mul_vec(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: y.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            super::axpy(yi, self.row(i), &mut out);
        }
        Ok(out)
    }

    /// `A Aᵀ`, always exactly symmetric.
    pub fn gram_rows(&self) -> SymmetricMatrix {
        let n = self.rows;
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = super::dot(self.row(i), self.row(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        SymmetricMatrix {
            inner: g,
            psd_checked: false,
        }
    }

    /// `Aᵀ A`, always exactly symmetric.
    pub fn gram_cols(&self) -> SymmetricMatrix {
        self.transpose().gram_rows()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.sub(&other.scale(-1.0))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Square matrix with `entries[i][j] == entries[j][i]` holding exactly.
///
/// `psd_checked` is only ever set by [`SymmetricMatrix::check_psd`], after the
/// eigenvalues have been confirmed to be at least `-tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    inner: Matrix,
    psd_checked: bool,
}

impl SymmetricMatrix {
    /// Validates exact symmetry.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::invalid(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        if m.rows == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        for i in 0..m.rows {
            for j in (i + 1)..m.cols {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::invalid(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymmetricMatrix {
            inner: m,
            psd_checked: false,
        })
    }

    /// Replaces `m` by `(m + mᵀ) / 2`.
    pub fn symmetrize(m: &Matrix) -> Result<Self> {
        if m.rows != m.cols || m.rows == 0 {
            return Err(Error::invalid("symmetrize needs a non-empty square matrix"));
        }
        let n = m.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = m[(i, i)];
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Ok(SymmetricMatrix {
            inner: out,
            psd_checked: false,
        })
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix {
            inner: Matrix::identity(n),
            psd_checked: false,
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        SymmetricMatrix {
            inner: m,
            psd_checked: false,
        }
    }

    /// `U diag(d) Uᵀ`, symmetrized.
    pub fn from_eigen(vectors: &Matrix, values: &[f64]) -> Result<Self> {
        let n = vectors.rows();
        if vectors.cols() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.cols(),
                actual: values.len(),
            });
        }
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for (k, &d) in values.iter().enumerate() {
                    s += vectors[(i, k)] * d * vectors[(j, k)];
                }
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
        }
        SymmetricMatrix::new(m)
    }

    /// Rank-one projection `a aᵀ / ‖a‖²`.
    pub fn rank_one_projection(a: &[f64]) -> Result<Self> {
        let nrm = super::norm_sq(a);
        if nrm == 0.0 {
            return Err(Error::invalid("projection direction is zero"));
        }
        let n = a.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = a[i] * a[j] / nrm;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(SymmetricMatrix {
            inner: m,
            psd_checked: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.rows
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn psd_checked(&self) -> bool {
        self.psd_checked
    }

    /// Confirms all eigenvalues are `>= -tol` and marks the matrix.
    pub fn check_psd(mut self, tol: f64) -> Result<Self> {
        let eig = super::sym_eig(&self)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::invalid(format!(
                "matrix is not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        self.psd_checked = true;
        Ok(self)
    }

    pub fn scale(&self, s: f64) -> SymmetricMatrix {
        SymmetricMatrix {
            inner: self.inner.scale(s),
            psd_checked: self.psd_checked && s >= 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)]).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.inner.mul_vec(x)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.inner[(i, j)] == 0.0))
    }
}

impl std::ops::Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.inner[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_input() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-15, 1.0]]).unwrap();
        assert!(SymmetricMatrix::new(m.clone()).is_err());
        let s = SymmetricMatrix::symmetrize(&m).unwrap();
        assert_eq!(s[(0, 1)], s[(1, 0)]);
    }

    #[test]
    fn matmul_and_transpose() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let g = a.matmul(&a.transpose()).unwrap();
        assert_eq!(g.as_slice(), &[14.0, 32.0, 32.0, 77.0]);
        assert_eq!(a.gram_rows().matrix(), &g);
        assert_eq!(a.tr_mul_vec(&[1.0, 1.0]).unwrap(), vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn psd_flag_only_after_check() {
        let s = SymmetricMatrix::diagonal(&[1.0, 0.0]);
        assert!(!s.psd_checked());
        assert!(s.check_psd(1e-12).unwrap().psd_checked());
        assert!(SymmetricMatrix::diagonal(&[1.0, -0.5])
            .check_psd(1e-12)
            .is_err());
    }
}
