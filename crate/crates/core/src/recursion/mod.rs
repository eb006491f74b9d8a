//! The deterministic recursion `N_{t+1} = N_t (I - 2M̄) + ‖N_t‖ M̄`, `N₀ = M̄`,
//! whose spectral norm bounds the expected M-norm of a contraction process.
//!
//! In the eigenbasis of `M̄` (spectrum `ρ_k`) it reduces to the scalar
//! recursion `λ_{k,t+1} = λ_{k,t} (1 - 2ρ_k) + ρ_k μ_t` with
//! `μ_t = max_k λ_{k,t}`, which is the primary O(n)-per-step path.

mod checks;
mod fit;
mod output;

pub use checks::{
    alternation_report, check_upper_hypothesis, lower_bound_family, normalized_floor,
    upper_envelope, AlternationPattern, StabilizationReport, UpperHypothesisReport, Violation,
};
pub use fit::{default_window, fit_loglog, RateFit};
pub use output::{plot_script, write_recursion_csv, MAX_LAMBDA_COLUMNS};

use crate::linalg::{spectral_norm, Matrix, SymmetricMatrix};
use crate::{Error, Result};

/// Values below this are flushed to zero to keep the recursion out of
/// subnormal arithmetic.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Commutator Frobenius norm above which the matrix recursion is refused.
pub const COMMUTATOR_TOL: f64 = 1e-8;

/// Eigenvalues `λ_{k,t}` of `N_t` alongside the spectrum `ρ_k` of `M̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenRecursionState {
    rho: Vec<f64>,
    lambda: Vec<f64>,
    t: usize,
    clamped: bool,
}

/// Validates a spectrum: non-empty, every entry finite and in `[0, 1]`.
pub fn validate_spectrum(rho: &[f64]) -> Result<()> {
    if rho.is_empty() {
        return Err(Error::invalid("spectrum must be non-empty"));
    }
    if let Some(r) = rho.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::invalid(format!("spectrum entry {r} outside [0, 1]")));
    }
    Ok(())
}

impl EigenRecursionState {
    /// Starts from `N₀ = M̄`, i.e. `λ_{k,0} = ρ_k`.
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        validate_spectrum(&rho)?;
        let lambda = rho.clone();
        Ok(EigenRecursionState {
            rho,
            lambda,
            t: 0,
            clamped: false,
        })
    }

    pub fn with_lambda(rho: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        validate_spectrum(&rho)?;
        if lambda.len() != rho.len() {
            return Err(Error::DimensionMismatch {
                expected: rho.len(),
                actual: lambda.len(),
            });
        }
        if let Some(l) = lambda.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::invalid(format!(
                "eigenvalue {l} must be finite and >= 0"
            )));
        }
        Ok(EigenRecursionState {
            rho,
            lambda,
            t: 0,
            clamped: false,
        })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `μ_t = max_k λ_{k,t}`.
    pub fn mu(&self) -> f64 {
        self.lambda.iter().copied().fold(0.0, f64::max)
    }

    /// One step, evaluated as `λ(1 - ρ) + ρ(μ - λ)`: both terms are
    /// nonnegative, so rounding can never push an eigenvalue below zero.
    pub fn step(&mut self) {
        let mu = self.mu();
        let mut flushed = false;
        for (l, &r) in self.lambda.iter_mut().zip(&self.rho) {
            let next = *l * (1.0 - r) + r * (mu - *l);
            *l = if next < UNDERFLOW_FLOOR && next != 0.0 {
                flushed = true;
                0.0
            } else {
                next
            };
        }
        if flushed && !self.clamped {
            self.clamped = true;
            log::warn!(
                "eigenvalue recursion: values below {UNDERFLOW_FLOOR:e} flushed to zero at t = {}",
                self.t + 1
            );
        }
        self.t += 1;
    }
}

/// `(μ_0, ..., μ_T)` for the spectrum `rho`.
pub fn max_trace(rho: &[f64], steps: usize) -> Result<Vec<f64>> {
    let mut s = EigenRecursionState::new(rho.to_vec())?;
    let mut mu = Vec::with_capacity(steps + 1);
    mu.push(s.mu());
    for _ in 0..steps {
        s.step();
        mu.push(s.mu());
    }
    Ok(mu)
}

/// Full history of a recursion run.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionTrace {
    pub rho: Vec<f64>,
    pub mu: Vec<f64>,
    /// `lambdas[t][k] = λ_{k,t}`, when recorded.
    pub lambdas: Option<Vec<Vec<f64>>>,
}

pub fn run_recursion(rho: &[f64], steps: usize, record_lambdas: bool) -> Result<RecursionTrace> {
    let mut s = EigenRecursionState::new(rho.to_vec())?;
    let mut mu = Vec::with_capacity(steps + 1);
    let mut lambdas = record_lambdas.then(|| Vec::with_capacity(steps + 1));
    for t in 0..=steps {
        if t > 0 {
            s.step();
        }
        mu.push(s.mu());
        if let Some(l) = lambdas.as_mut() {
            l.push(s.lambda().to_vec());
        }
    }
    Ok(RecursionTrace {
        rho: rho.to_vec(),
        mu,
        lambdas,
    })
}

/// `‖A B - B A‖_F`.
pub fn commutator_norm(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<f64> {
    let ab = a.matrix().matmul(b.matrix())?;
    let ba = b.matrix().matmul(a.matrix())?;
    Ok(ab.sub(&ba)?.frobenius_norm())
}

/// One step of the matrix recursion; refuses non-commuting inputs.
pub fn matrix_recursion_step(
    n: &SymmetricMatrix,
    mbar: &SymmetricMatrix,
) -> Result<SymmetricMatrix> {
    let c = commutator_norm(n, mbar)?;
    if c > COMMUTATOR_TOL {
        return Err(Error::NonCommuting(c));
    }
    let norm = spectral_norm(n)?;
    let nm = n.matrix().matmul(mbar.matrix())?;
    let out: Matrix = n
        .matrix()
        .sub(&nm.scale(2.0))?
        .add(&mbar.matrix().scale(norm))?;
    SymmetricMatrix::symmetrize(&out)
}
