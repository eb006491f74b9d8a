use std::fmt::Write as _;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{ensure_finite, norm_sq, pseudoinverse_apply, Matrix};
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Relative residual tolerance for a reference solution.
const CONSISTENCY_TOL: f64 = 1e-8;

/// A consistent linear system with an optional known solution.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    a: Matrix,
    b: Vec<f64>,
    x_star: Option<Vec<f64>>,
    allow_zero_rows: bool,
}

impl LinearSystem {
    /// Validates shapes, finiteness, nonzero rows and, when `x_star` is
    /// given, `‖A x* - b‖ <= 1e-8 (1 + ‖b‖)`.
    pub fn new(a: Matrix, b: Vec<f64>, x_star: Option<Vec<f64>>) -> Result<Self> {
        Self::build(a, b, x_star, false)
    }

    /// Like [`LinearSystem::new`] but accepts all-zero rows. Row samplers give
    /// such rows zero probability.
    pub fn with_zero_rows(a: Matrix, b: Vec<f64>, x_star: Option<Vec<f64>>) -> Result<Self> {
        Self::build(a, b, x_star, true)
    }

    fn build(
        a: Matrix,
        b: Vec<f64>,
        x_star: Option<Vec<f64>>,
        allow_zero_rows: bool,
    ) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(Error::invalid(
                "system must have at least one row and column",
            ));
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: b.len(),
            });
        }
        ensure_finite(a.as_slice(), "A")?;
        ensure_finite(&b, "b")?;
        if !allow_zero_rows {
            if let Some(i) = (0..m).find(|&i| a.row(i).iter().all(|&v| v == 0.0)) {
                return Err(Error::invalid(format!("row {i} of A is identically zero")));
            }
        }
        if let Some(xs) = &x_star {
            if xs.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: xs.len(),
                });
            }
            ensure_finite(xs, "x*")?;
            check_consistency(&a, &b, xs)?;
        }
        Ok(LinearSystem {
            a,
            b,
            x_star,
            allow_zero_rows,
        })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn x_star(&self) -> Option<&[f64]> {
        self.x_star.as_deref()
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn allows_zero_rows(&self) -> bool {
        self.allow_zero_rows
    }

    /// `x*` if known, else the minimum-norm solution `A⁺ b`, which must
    /// satisfy the consistency tolerance.
    pub fn reference_solution(&self) -> Result<Vec<f64>> {
        if let Some(xs) = &self.x_star {
            return Ok(xs.clone());
        }
        let x = pseudoinverse_apply(&self.a, &self.b)?;
        check_consistency(&self.a, &self.b, &x)?;
        Ok(x)
    }

    /// `‖A x - b‖²`.
    pub fn residual_sq(&self, x: &[f64]) -> Result<f64> {
        let ax = self.a.mul_vec(x)?;
        Ok(ax.iter().zip(&self.b).map(|(p, q)| (p - q).powi(2)).sum())
    }

    /// Parses the plain-text format: a header `m n`, the `m x n` entries of
    /// `A` in row order, the `m` entries of `b`, then optionally the `n`
    /// entries of `x*`. Whitespace layout is free; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        let mut dim = |what: &str| -> Result<usize> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what} in header")))?;
            tok.parse()
                .map_err(|_| Error::Parse(format!("bad {what} in header: {tok:?}")))
        };
        let m = dim("row count")?;
        let n = dim("column count")?;
        let values: Vec<f64> = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("not a number: {t:?}")))
            })
            .collect::<Result<_>>()?;
        let base = m * n + m;
        let x_star = match values.len() {
            l if l == base => None,
            l if l == base + n => Some(values[base..].to_vec()),
            l => {
                return Err(Error::Parse(format!(
                    "expected {base} or {} numbers after the header, found {l}",
                    base + n
                )))
            }
        };
        let a = Matrix::from_row_major(m, n, values[..m * n].to_vec())?;
        let b = values[m * n..base].to_vec();
        LinearSystem::new(a, b, x_star)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        LinearSystem::parse(&text)
    }

    /// Serializes in the format read by [`LinearSystem::parse`].
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.rows(), self.cols());
        for i in 0..self.rows() {
            let _ = writeln!(out, "{}", join(self.a.row(i)));
        }
        let _ = writeln!(out, "{}", join(&self.b));
        if let Some(xs) = &self.x_star {
            let _ = writeln!(out, "{}", join(xs));
        }
        out
    }
}

fn check_consistency(a: &Matrix, b: &[f64], x: &[f64]) -> Result<()> {
    let ax = a.mul_vec(x)?;
    let residual = ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q).powi(2))
        .sum::<f64>()
        .sqrt();
    if residual > CONSISTENCY_TOL * (1.0 + norm_sq(b).sqrt()) {
        return Err(Error::Inconsistent { residual });
    }
    Ok(())
}

/// Consistent system with i.i.d. standard normal `A` and `x*`, and
/// `b = A x*`. Uses stream 0 of `seed`.
pub fn random_gaussian_system(m: usize, n: usize, seed: u64) -> Result<LinearSystem> {
    let mut rng = stream_rng(seed, 0);
    let a = Matrix::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng));
    let x_star: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let b = a.mul_vec(&x_star)?;
    LinearSystem::new(a, b, Some(x_star))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_with_comments_and_solution() {
        let text = "# two by two\n2 2\n1 0\n0 2 # second row\n3 4\n3 2\n";
        let sys = LinearSystem::parse(text).unwrap();
        assert_eq!(sys.x_star(), Some(&[3.0, 2.0][..]));
        let again = LinearSystem::parse(&sys.to_text()).unwrap();
        assert_eq!(again.a(), sys.a());
        assert_eq!(again.b(), sys.b());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            LinearSystem::parse("2 2\n1 0\n0 1\n1"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(LinearSystem::parse("x 2"), Err(Error::Parse(_))));
        assert!(matches!(
            LinearSystem::parse("1 1\n2\n4\n3"),
            Err(Error::Inconsistent { .. })
        ));
        assert!(matches!(
            LinearSystem::parse("2 1\n0\n1\n0 1"),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn min_norm_fallback() {
        let sys = LinearSystem::parse("1 2\n1 1\n2\n").unwrap();
        let x = sys.reference_solution().unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        let bad = LinearSystem::parse("2 1\n1\n1\n1 2\n").unwrap();
        assert!(matches!(
            bad.reference_solution(),
            Err(Error::Inconsistent { .. })
        ));
    }

    #[test]
    fn gaussian_system_is_consistent_and_seeded() {
        let s1 = random_gaussian_system(6, 3, 11).unwrap();
        let s2 = random_gaussian_system(6, 3, 11).unwrap();
        assert_eq!(s1.a(), s2.a());
        assert!(s1.residual_sq(s1.x_star().unwrap()).unwrap() < 1e-20);
    }
}
