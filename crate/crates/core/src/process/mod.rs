//! Stochastic contraction processes `Δ_{t+1} = (I - M_t) Δ_t` with
//! independent random `0 ⪯ M_t ⪯ I` sharing the mean `M̄`, and a Monte Carlo
//! harness for their expected behaviour.

mod monte_carlo;
mod samplers;

pub use monte_carlo::{
    check_averaged_bound, exceedances, monte_carlo, AveragedBoundReport, Exceedance,
    MonteCarloTrace, Summary,
};
pub use samplers::{
    BernoulliDiagonalSampler, Contraction, ContractionSampler, FixedSampler, RankOneSampler,
};

use crate::linalg::{m_norm_sq, norm_sq, sym_eig, SymmetricMatrix};
use crate::rng::{stream_rng, Rng};
use crate::{Error, Result};

/// Eigenvalues of a contraction must lie in `[-CONTRACTION_TOL, 1 + CONTRACTION_TOL]`.
pub const CONTRACTION_TOL: f64 = 1e-10;

/// Checks `0 ⪯ M ⪯ I` up to [`CONTRACTION_TOL`].
pub fn validate_contraction(m: &SymmetricMatrix) -> Result<()> {
    let e = sym_eig(m)?;
    let top = e.values[0];
    let bottom = *e.values.last().expect("dim >= 1");
    if top > 1.0 + CONTRACTION_TOL {
        return Err(Error::InvalidContraction(top));
    }
    if bottom < -CONTRACTION_TOL {
        return Err(Error::InvalidContraction(bottom));
    }
    Ok(())
}

/// One step `(I - M) Δ` with `M` validated as a contraction.
pub fn process_step(delta: &[f64], m: &SymmetricMatrix) -> Result<Vec<f64>> {
    validate_contraction(m)?;
    let md = m.mul_vec(delta)?;
    Ok(delta.iter().zip(md).map(|(d, v)| d - v).collect())
}

/// A contraction process: a sampler for `M_t` and a starting vector `Δ₀`.
pub struct ContractionProcess {
    sampler: Box<dyn ContractionSampler>,
    delta0: Vec<f64>,
}

impl ContractionProcess {
    pub fn new(sampler: Box<dyn ContractionSampler>, delta0: Vec<f64>) -> Result<Self> {
        if delta0.len() != sampler.dim() {
            return Err(Error::DimensionMismatch {
                expected: sampler.dim(),
                actual: delta0.len(),
            });
        }
        crate::linalg::ensure_finite(&delta0, "Δ₀")?;
        Ok(ContractionProcess { sampler, delta0 })
    }

    pub fn dim(&self) -> usize {
        self.delta0.len()
    }

    pub fn mbar(&self) -> &SymmetricMatrix {
        self.sampler.mbar()
    }

    pub fn delta0(&self) -> &[f64] {
        &self.delta0
    }

    pub fn sampler(&self) -> &dyn ContractionSampler {
        self.sampler.as_ref()
    }

    /// One trajectory of `steps` steps drawing from `rng`.
    pub fn trajectory(&self, steps: usize, rng: &mut Rng) -> Result<ContractionTrace> {
        let mbar = self.mbar();
        let n = self.dim();
        let mut delta = self.delta0.clone();
        let mut sum = vec![0.0; n];
        let mut trace = ContractionTrace::with_capacity(steps + 1);
        let mut mnorm_total = 0.0;
        for t in 0..=steps {
            if t > 0 {
                self.sampler.draw(rng).apply(&mut delta);
            }
            for (s, d) in sum.iter_mut().zip(&delta) {
                *s += d;
            }
            let scale = 1.0 / (t as f64 + 1.0);
            let avg: Vec<f64> = sum.iter().map(|s| s * scale).collect();
            let mn = m_norm_sq(&delta, mbar)?;
            mnorm_total += mn;
            trace.norm_sq.push(norm_sq(&delta));
            trace.mnorm_sq.push(mn);
            trace.avg_mnorm_sq.push(m_norm_sq(&avg, mbar)?);
            trace
                .random_iterate_mnorm_sq
                .push(mnorm_total / (t as f64 + 1.0));
        }
        Ok(trace)
    }
}

/// Per-step records of one trajectory, `T + 1` entries each.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContractionTrace {
    /// `‖Δ_t‖²`.
    pub norm_sq: Vec<f64>,
    /// `‖Δ_t‖²_{M̄}`.
    pub mnorm_sq: Vec<f64>,
    /// `‖Δ̄_t‖²_{M̄}` for the averaged iterate `Δ̄_t = (1/(t+1)) Σ_{i<=t} Δ_i`.
    pub avg_mnorm_sq: Vec<f64>,
    /// `(1/(t+1)) Σ_{i<=t} ‖Δ_i‖²_{M̄}`: the conditional expectation over a
    /// uniformly chosen iterate `τ ∈ {0..t}`.
    pub random_iterate_mnorm_sq: Vec<f64>,
}

impl ContractionTrace {
    fn with_capacity(n: usize) -> Self {
        ContractionTrace {
            norm_sq: Vec::with_capacity(n),
            mnorm_sq: Vec::with_capacity(n),
            avg_mnorm_sq: Vec::with_capacity(n),
            random_iterate_mnorm_sq: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.norm_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norm_sq.is_empty()
    }
}

/// A single trajectory on stream 0 of `seed`.
pub fn run_process(p: &ContractionProcess, steps: usize, seed: u64) -> Result<ContractionTrace> {
    p.trajectory(steps, &mut stream_rng(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::solvers::{random_gaussian_system, run_solver, Method, SolverConfig};
    use approx::assert_relative_eq;

    #[test]
    fn step_examples() {
        let d = [1.0, -2.0, 3.0];
        assert_eq!(
            process_step(&d, &SymmetricMatrix::diagonal(&[0.0; 3])).unwrap(),
            d.to_vec()
        );
        assert_eq!(
            process_step(&d, &SymmetricMatrix::identity(3)).unwrap(),
            vec![0.0; 3]
        );
        let p = SymmetricMatrix::rank_one_projection(&d).unwrap();
        let out = process_step(&d, &p).unwrap();
        assert!(norm_sq(&out) < 1e-28);
    }

    #[test]
    fn step_rejects_non_contractions() {
        let d = [1.0, 1.0];
        assert!(matches!(
            process_step(&d, &SymmetricMatrix::diagonal(&[1.5, 0.0])),
            Err(Error::InvalidContraction(v)) if v == 1.5
        ));
        assert!(matches!(
            process_step(&d, &SymmetricMatrix::diagonal(&[0.5, -0.1])),
            Err(Error::InvalidContraction(_))
        ));
    }

    #[test]
    fn fixed_sampler_decays_geometrically() {
        let m = SymmetricMatrix::diagonal(&[0.5, 0.2]);
        let p = ContractionProcess::new(Box::new(FixedSampler::new(m).unwrap()), vec![1.0, 1.0])
            .unwrap();
        let tr = run_process(&p, 30, 0).unwrap();
        for t in 0..=30 {
            let expect = 0.5 * 0.25f64.powi(t) + 0.2 * 0.64f64.powi(t);
            assert_relative_eq!(tr.mnorm_sq[t as usize], expect, max_relative = 1e-12);
        }
        assert_relative_eq!(tr.mnorm_sq[30] / tr.mnorm_sq[29], 0.64, max_relative = 1e-3);
    }

    #[test]
    fn zero_start_stays_zero() {
        let sys = random_gaussian_system(8, 4, 1).unwrap();
        let s = RankOneSampler::kaczmarz(sys.a()).unwrap();
        let p = ContractionProcess::new(Box::new(s), vec![0.0; 4]).unwrap();
        let tr = run_process(&p, 20, 3).unwrap();
        assert!(tr
            .norm_sq
            .iter()
            .chain(&tr.mnorm_sq)
            .chain(&tr.avg_mnorm_sq)
            .all(|&v| v == 0.0));
    }

    #[test]
    fn kaczmarz_process_matches_solver() {
        let sys = random_gaussian_system(20, 10, 4).unwrap();
        let xs = sys.x_star().unwrap().to_vec();
        let s = RankOneSampler::kaczmarz(sys.a()).unwrap();
        let p = ContractionProcess::new(Box::new(s), xs.iter().map(|v| -v).collect()).unwrap();
        let seed = 99;
        let tr = run_process(&p, 500, seed).unwrap();
        let run = run_solver(&sys, &SolverConfig::new(Method::Rk, seed), 500).unwrap();
        for t in 0..=500 {
            assert!(
                (tr.norm_sq[t] - run.trace.dist_sq[t]).abs()
                    <= 1e-10 * (1.0 + run.trace.dist_sq[0])
            );
            assert!(
                (tr.mnorm_sq[t] - run.trace.mnorm_sq[t]).abs()
                    <= 1e-10 * (1.0 + run.trace.mnorm_sq[0])
            );
        }
    }

    #[test]
    fn norms_never_increase() {
        let a = Matrix::from_fn(12, 5, |i, j| {
            ((i * 3 + j * 5) % 7) as f64 - 3.0 + 0.1 * i as f64
        });
        let s = RankOneSampler::kaczmarz(&a).unwrap();
        let p = ContractionProcess::new(Box::new(s), vec![1.0, -1.0, 2.0, 0.5, 3.0]).unwrap();
        let tr = run_process(&p, 400, 1).unwrap();
        let slack = 1e-10 * tr.norm_sq[0].sqrt();
        assert!(tr
            .norm_sq
            .windows(2)
            .all(|w| w[1].sqrt() <= w[0].sqrt() + slack));
    }
}
