use rand::Rng;

use super::LinearSystem;
use crate::linalg::Matrix;
use crate::rng::stream_rng;
use crate::{Error, Result};

/// RNG stream reserved for drawing the RHT sign diagonal, so preprocessing
/// never shares draws with the solver's stream 0.
pub const RHT_STREAM: u64 = u64::MAX;

/// In-place unnormalized fast Walsh–Hadamard transform (Sylvester order).
pub fn fwht(v: &mut [f64]) -> Result<()> {
    let n = v.len();
    if !n.is_power_of_two() {
        return Err(Error::invalid(format!(
            "FWHT length {n} is not a power of two"
        )));
    }
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (p, q) = (v[i], v[i + h]);
                v[i] = p + q;
                v[i + h] = p - q;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// Randomized Hadamard transform with Rademacher signs drawn from `seed`.
pub fn rht_preprocess(sys: &LinearSystem, seed: u64) -> Result<LinearSystem> {
    let padded = sys.rows().next_power_of_two();
    let mut rng = stream_rng(seed, RHT_STREAM);
    let signs: Vec<f64> = (0..padded)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    rht_with_signs(sys, &signs)
}

/// Pads `A` and `b` with zero rows to `m' = 2^k >= m` and returns
/// `(QA, Qb)` with `Q = H D / √m'`, `D = diag(signs)`. `x*` is unchanged
/// because `Q` is orthogonal.
pub fn rht_with_signs(sys: &LinearSystem, signs: &[f64]) -> Result<LinearSystem> {
    let (m, n) = (sys.rows(), sys.cols());
    let padded = m.next_power_of_two();
    if signs.len() != padded {
        return Err(Error::DimensionMismatch {
            expected: padded,
            actual: signs.len(),
        });
    }
    if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(Error::invalid("RHT signs must be +1 or -1"));
    }
    let scale = 1.0 / (padded as f64).sqrt();
    let transform = |col: &mut Vec<f64>| -> Result<()> {
        col.resize(padded, 0.0);
        for (c, s) in col.iter_mut().zip(signs) {
            *c *= s;
        }
        fwht(col)?;
        col.iter_mut().for_each(|c| *c *= scale);
        Ok(())
    };
    let mut qa = Matrix::zeros(padded, n);
    for j in 0..n {
        let mut col = sys.a().column(j);
        transform(&mut col)?;
        for (i, v) in col.into_iter().enumerate() {
            qa[(i, j)] = v;
        }
    }
    let mut qb = sys.b().to_vec();
    transform(&mut qb)?;
    LinearSystem::with_zero_rows(qa, qb, sys.x_star().map(<[f64]>::to_vec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::random_gaussian_system;
    use approx::assert_relative_eq;

    #[test]
    fn fwht_matches_hadamard() {
        let mut v = vec![1.0, 0.0, 0.0, 0.0];
        fwht(&mut v).unwrap();
        assert_eq!(v, vec![1.0; 4]);
        let mut v = vec![0.0, 1.0, 0.0, 0.0];
        fwht(&mut v).unwrap();
        assert_eq!(v, vec![1.0, -1.0, 1.0, -1.0]);
        assert!(fwht(&mut [1.0; 3]).is_err());
    }

    #[test]
    fn identity_signs_give_scaled_hadamard() {
        let a = Matrix::from_rows(&[
            vec![1.0, 2.0],
            vec![3.0, 4.0],
            vec![5.0, 6.0],
            vec![7.0, 8.0],
        ])
        .unwrap();
        let sys = LinearSystem::new(a.clone(), vec![1.0, 2.0, 3.0, 4.0], None).unwrap();
        let out = rht_with_signs(&sys, &[1.0; 4]).unwrap();
        let h = Matrix::from_rows(&[
            vec![1.0, 1.0, 1.0, 1.0],
            vec![1.0, -1.0, 1.0, -1.0],
            vec![1.0, 1.0, -1.0, -1.0],
            vec![1.0, -1.0, -1.0, 1.0],
        ])
        .unwrap();
        let expect = h.matmul(&a).unwrap().scale(0.5);
        assert!(out.a().sub(&expect).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn single_row_is_unchanged_up_to_sign() {
        let sys = LinearSystem::new(
            Matrix::from_rows(&[vec![2.0, 3.0]]).unwrap(),
            vec![5.0],
            None,
        )
        .unwrap();
        let out = rht_preprocess(&sys, 9).unwrap();
        let s = out.b()[0] / 5.0;
        assert!(s == 1.0 || s == -1.0);
        assert_eq!(out.a().row(0), &[2.0 * s, 3.0 * s]);
    }

    #[test]
    fn padded_transform_preserves_norm_and_solution() {
        let sys = random_gaussian_system(6, 3, 21).unwrap();
        let out = rht_preprocess(&sys, 4).unwrap();
        assert_eq!(out.rows(), 8);
        assert_relative_eq!(
            out.a().frobenius_norm(),
            sys.a().frobenius_norm(),
            max_relative = 1e-12
        );
        assert!(out.residual_sq(out.x_star().unwrap()).unwrap().sqrt() < 1e-8);
    }
}
