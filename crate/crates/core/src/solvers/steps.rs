use crate::linalg::{
    axpy, dot, norm_sq, pseudoinverse_apply, sym_inv_sqrt, Matrix, SymmetricMatrix,
};
use crate::{Error, Result};

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Projects `x` onto the hyperplane `{y : aᵀy = b_i}`.
pub fn kaczmarz_step(x: &[f64], a: &[f64], b_i: f64) -> Result<Vec<f64>> {
    check_len(x.len(), a.len())?;
    let nrm = norm_sq(a);
    if nrm == 0.0 {
        return Err(Error::ZeroRow);
    }
    let mut out = x.to_vec();
    axpy(-(dot(a, x) - b_i) / nrm, a, &mut out);
    Ok(out)
}

/// Exact minimization along coordinate `i` of `½xᵀAx - bᵀx`.
pub fn rcd_step(x: &[f64], a: &SymmetricMatrix, b: &[f64], i: usize) -> Result<Vec<f64>> {
    let n = a.dim();
    check_len(n, x.len())?;
    check_len(n, b.len())?;
    if i >= n {
        return Err(Error::invalid(format!(
            "coordinate {i} out of range for dimension {n}"
        )));
    }
    let aii = a[(i, i)];
    if aii.is_nan() || aii <= 0.0 {
        return Err(Error::InvalidDiagonal {
            index: i,
            value: aii,
        });
    }
    let r_i = dot(a.matrix().row(i), x) - b[i];
    let mut out = x.to_vec();
    out[i] -= r_i / aii;
    Ok(out)
}

/// `x - A_S⁺ (A_S x - b_S)`: the closest point to `x` solving the block.
pub fn block_kaczmarz_step(x: &[f64], a_s: &Matrix, b_s: &[f64]) -> Result<Vec<f64>> {
    check_len(a_s.rows(), b_s.len())?;
    let mut r = a_s.mul_vec(x)?;
    for (ri, bi) in r.iter_mut().zip(b_s) {
        *ri -= bi;
    }
    let corr = pseudoinverse_apply(a_s, &r)?;
    let mut out = x.to_vec();
    axpy(-1.0, &corr, &mut out);
    Ok(out)
}

/// Sketch-and-project: `argmin ‖y - x‖_B` subject to `S A y = S b`, computed
/// as `x - B^{-1/2} (S A B^{-1/2})⁺ S (A x - b)`.
pub fn sketch_project_step(
    x: &[f64],
    a: &Matrix,
    b: &[f64],
    s: &Matrix,
    metric: &SymmetricMatrix,
) -> Result<Vec<f64>> {
    check_len(metric.dim(), x.len())?;
    let inv_sqrt = sym_inv_sqrt(metric)?;
    sketch_project_step_prepared(x, a, b, s, Some(&inv_sqrt))
}

/// [`sketch_project_step`] with `B^{-1/2}` precomputed; `None` means `B = I`.
pub fn sketch_project_step_prepared(
    x: &[f64],
    a: &Matrix,
    b: &[f64],
    s: &Matrix,
    inv_sqrt_metric: Option<&SymmetricMatrix>,
) -> Result<Vec<f64>> {
    check_len(a.cols(), x.len())?;
    check_len(a.rows(), b.len())?;
    check_len(a.rows(), s.cols())?;
    let sa = s.matmul(a)?;
    let mut r = a.mul_vec(x)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    let sr = s.mul_vec(&r)?;
    let corr = match inv_sqrt_metric {
        None => pseudoinverse_apply(&sa, &sr)?,
        Some(w) => {
            let saw = sa.matmul(w.matrix())?;
            w.mul_vec(&pseudoinverse_apply(&saw, &sr)?)?
        }
    };
    let mut out = x.to_vec();
    axpy(-1.0, &corr, &mut out);
    Ok(out)
}
