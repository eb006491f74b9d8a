use super::{sym_eig, Matrix, SymmetricMatrix};
use crate::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
const RANK_CUTOFF: f64 = 1e-10;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::invalid(format!(
            "{what} has a non-finite entry at {i}"
        ))),
        None => Ok(()),
    }
}

/// `xᵀ M x`, with tiny negative round-off clamped to zero.
pub fn m_norm_sq(x: &[f64], m: &SymmetricMatrix) -> Result<f64> {
    let mx = m.mul_vec(x)?;
    Ok(dot(x, &mx).max(0.0))
}

/// Largest absolute eigenvalue.
pub fn spectral_norm(s: &SymmetricMatrix) -> Result<f64> {
    if s.is_diagonal() {
        return Ok((0..s.dim()).map(|i| s[(i, i)].abs()).fold(0.0, f64::max));
    }
    let e = sym_eig(s)?;
    Ok(e.values.iter().map(|v| v.abs()).fold(0.0, f64::max))
}

/// Nonzero singular triplets of `b` as `(σ², v)` with `v` a unit left
/// singular vector (an eigenvector of `b bᵀ`).
fn left_singular(b: &Matrix) -> Result<Vec<(f64, Vec<f64>)>> {
    if b.rows() == 0 {
        return Ok(Vec::new());
    }
    let e = sym_eig(&b.gram_rows())?;
    let top = e.values.first().copied().unwrap_or(0.0).max(0.0);
    if top == 0.0 {
        return Ok(Vec::new());
    }
    let cut = (RANK_CUTOFF * top.sqrt()).powi(2);
    Ok(e.values
        .iter()
        .enumerate()
        .filter(|(_, &s2)| s2 > cut)
        .map(|(k, &s2)| (s2, e.vector(k)))
        .collect())
}

/// Orthogonal projector onto the row space of `b` (a `k x n` matrix).
///
/// Rank is decided with the relative cutoff `σ <= 1e-10 σ_max`, so rows
/// that are linearly dependent are handled without error.
pub fn row_space_projection(b: &Matrix) -> Result<SymmetricMatrix> {
    let n = b.cols();
    if n == 0 {
        return Err(Error::invalid(
            "row_space_projection needs at least one column",
        ));
    }
    let mut p = Matrix::zeros(n, n);
    for (s2, v) in left_singular(b)? {
        let mut u = b.tr_mul_vec(&v)?;
        let inv = 1.0 / s2.sqrt();
        u.iter_mut().for_each(|x| *x *= inv);
        for i in 0..n {
            for j in i..n {
                p[(i, j)] += u[i] * u[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            p[(i, j)] = p[(j, i)];
        }
    }
    SymmetricMatrix::new(p)
}

/// `b⁺ r` for a `k x n` matrix `b`.
pub fn pseudoinverse_apply(b: &Matrix, r: &[f64]) -> Result<Vec<f64>> {
    if r.len() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: b.rows(),
            actual: r.len(),
        });
    }
    let mut coeffs = vec![0.0; b.rows()];
    for (s2, v) in left_singular(b)? {
        axpy(dot(&v, r) / s2, &v, &mut coeffs);
    }
    b.tr_mul_vec(&coeffs)
}

fn spectral_map(s: &SymmetricMatrix, f: impl Fn(f64) -> f64) -> Result<SymmetricMatrix> {
    let e = sym_eig(s)?;
    let top = e.values.first().copied().unwrap_or(0.0);
    if e.values.iter().any(|&v| v <= RANK_CUTOFF * top.abs()) || top <= 0.0 {
        return Err(Error::InvalidMetric(
            e.values.last().copied().unwrap_or(0.0),
        ));
    }
    let mapped: Vec<f64> = e.values.iter().map(|&v| f(v)).collect();
    SymmetricMatrix::from_eigen(&e.vectors, &mapped)
}

/// Principal square root of a positive definite matrix.
pub fn sym_sqrt(s: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    spectral_map(s, f64::sqrt)
}

/// Inverse principal square root of a positive definite matrix.
pub fn sym_inv_sqrt(s: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    spectral_map(s, |v| 1.0 / v.sqrt())
}
