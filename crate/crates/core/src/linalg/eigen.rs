use super::{Matrix, SymmetricMatrix};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_TOL: f64 = 1e-12;

/// Eigendecomposition `S = U diag(values) Uᵀ`.
///
/// `values` are sorted in descending order; column `k` of `vectors` is the
/// unit eigenvector for `values[k]`.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenPair {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    pub fn reconstruct(&self) -> Result<SymmetricMatrix> {
        SymmetricMatrix::from_eigen(&self.vectors, &self.values)
    }
}

fn off_diagonal_sum(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[(i, j)].abs();
        }
    }
    s
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps until the sum of absolute off-diagonal entries drops below
/// `1e-12 * ‖S‖_F`. Fails after 100 sweeps or on non-finite input.
pub fn sym_eig(s: &SymmetricMatrix) -> Result<EigenPair> {
    let mut a = s.matrix().clone();
    if !a.is_finite() {
        return Err(Error::invalid("matrix contains non-finite entries"));
    }
    let n = a.rows();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let tol = OFF_TOL * scale;

    let mut converged = off_diagonal_sum(&a) <= tol;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::invalid(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_sum(&a) <= tol;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenPair { values, vectors })
}

/// Annihilates `a[p][q]` with one Givens rotation, accumulating into `v`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    if t == 0.0 {
        a[(p, q)] = 0.0;
        a[(q, p)] = 0.0;
        return;
    }
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();
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

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_by_two() {
        let s = SymmetricMatrix::new(Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap())
            .unwrap();
        let e = sym_eig(&s).unwrap();
        assert_relative_eq!(e.values[0], 3.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let u = e.vector(0);
        assert_relative_eq!(u[0].abs(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_is_already_converged() {
        let e = sym_eig(&SymmetricMatrix::diagonal(&[0.1, 0.9, 0.5])).unwrap();
        assert_eq!(e.values, vec![0.9, 0.5, 0.1]);
    }

    #[test]
    fn zero_matrix() {
        let e = sym_eig(&SymmetricMatrix::diagonal(&[0.0, 0.0])).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0]);
    }

    #[test]
    fn reconstructs_dense_matrix() {
        let n = 12;
        let b = Matrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let s = b.gram_rows();
        let e = sym_eig(&s).unwrap();
        let r = e.reconstruct().unwrap();
        let err = r.matrix().sub(s.matrix()).unwrap().frobenius_norm();
        assert!(err <= 1e-10 * s.matrix().frobenius_norm(), "err {err}");
        let vtv = e.vectors.transpose().matmul(&e.vectors).unwrap();
        let orth = vtv.sub(&Matrix::identity(n)).unwrap().frobenius_norm();
        assert!(orth < 1e-12, "orth {orth}");
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}
