use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};

use super::{
    block_kaczmarz_step, kaczmarz_step, rcd_step, rht_preprocess, sketch_project_step_prepared,
    LinearSystem, RowSampler,
};
use crate::linalg::{Matrix, SymmetricMatrix};
use crate::rng::stream_rng;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Randomized Kaczmarz, rows drawn with probability `∝ ‖a_i‖²`.
    Rk,
    /// Randomized coordinate descent on a symmetric PSD system, coordinates
    /// drawn with probability `∝ A_ii`.
    Rcd,
    /// Block Kaczmarz over `block_size` distinct uniformly drawn rows.
    BlockKaczmarz,
    /// Sketch-and-project with a Gaussian `block_size x m` sketch and `B = I`.
    SketchProject,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk" | "kaczmarz" => Ok(Method::Rk),
            "rcd" | "cd" => Ok(Method::Rcd),
            "block" | "block-kaczmarz" => Ok(Method::BlockKaczmarz),
            "sketch" | "sketch-project" => Ok(Method::SketchProject),
            _ => Err(Error::invalid(format!(
                "unknown method {s:?} (expected rk, rcd, block or sketch)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rk => "rk",
            Method::Rcd => "rcd",
            Method::BlockKaczmarz => "block",
            Method::SketchProject => "sketch",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub method: Method,
    pub block_size: usize,
    pub seed: u64,
    pub rht: bool,
}

impl SolverConfig {
    pub fn new(method: Method, seed: u64) -> Self {
        SolverConfig {
            method,
            block_size: 1,
            seed,
            rht: false,
        }
    }

    fn validate(&self, sys: &LinearSystem) -> Result<()> {
        if matches!(self.method, Method::BlockKaczmarz | Method::SketchProject)
            && !(1..=sys.rows()).contains(&self.block_size)
        {
            return Err(Error::invalid(format!(
                "block size {} must lie in 1..={}",
                self.block_size,
                sys.rows()
            )));
        }
        if self.method == Method::Rcd && self.rht {
            return Err(Error::invalid(
                "RHT preprocessing destroys the symmetry coordinate descent needs",
            ));
        }
        Ok(())
    }
}

/// Per-step records of one solver trajectory, `T + 1` entries each.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverTrace {
    /// `‖x_t - x*‖²`.
    pub dist_sq: Vec<f64>,
    /// `‖A x_t - b‖²`.
    pub residual_sq: Vec<f64>,
    /// `‖Δ_t‖²_{M̄}`: `‖A x_t - b‖² / ‖A‖_F²` for the row methods and
    /// `‖A x_t - b‖² / tr(A)` for coordinate descent.
    pub mnorm_sq: Vec<f64>,
}

impl SolverTrace {
    pub fn len(&self) -> usize {
        self.dist_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist_sq.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "dist_sq", "residual_sq", "mnorm_sq"])?;
        for t in 0..self.len() {
            out.write_record([
                t.to_string(),
                self.dist_sq[t].to_string(),
                self.residual_sq[t].to_string(),
                self.mnorm_sq[t].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolverRun {
    pub trace: SolverTrace,
    pub x: Vec<f64>,
    /// `(‖A‖_F, ‖QA‖_F)` when RHT preprocessing was applied.
    pub rht_frobenius: Option<(f64, f64)>,
}

/// Runs `steps` iterations from `x₀ = 0`. Deterministic given `cfg.seed`:
/// the iteration draws from stream 0, RHT signs from a reserved stream.
pub fn run_solver(sys: &LinearSystem, cfg: &SolverConfig, steps: usize) -> Result<SolverRun> {
    cfg.validate(sys)?;
    let x_ref = sys.reference_solution()?;
    let (work, rht_frobenius) = if cfg.rht {
        let q = rht_preprocess(sys, cfg.seed)?;
        let norms = (sys.a().frobenius_norm(), q.a().frobenius_norm());
        (q, Some(norms))
    } else {
        (sys.clone(), None)
    };
    let a = work.a();
    let b = work.b();
    let (m, n) = a.shape();

    let mut rng = stream_rng(cfg.seed, 0);
    let rcd_matrix = if cfg.method == Method::Rcd {
        Some(rcd_system(a)?)
    } else {
        None
    };
    let normalizer = match &rcd_matrix {
        Some(s) => s.trace(),
        None => a.frobenius_norm().powi(2),
    };
    let sampler = match &rcd_matrix {
        Some(s) => Some(RowSampler::diagonal(s)?),
        None if cfg.method == Method::Rk => Some(RowSampler::row_norms(a)?),
        None => None,
    };

    let mut trace = SolverTrace::default();
    let mut x = vec![0.0; n];
    let mut record = |x: &[f64]| -> Result<()> {
        let dist = x.iter().zip(&x_ref).map(|(p, q)| (p - q).powi(2)).sum();
        let res = work.residual_sq(x)?;
        trace.dist_sq.push(dist);
        trace.residual_sq.push(res);
        trace.mnorm_sq.push(res / normalizer);
        Ok(())
    };
    record(&x)?;
    for _ in 0..steps {
        x = match cfg.method {
            Method::Rk => {
                let i = sampler.as_ref().expect("RK sampler").sample(&mut rng);
                kaczmarz_step(&x, a.row(i), b[i])?
            }
            Method::Rcd => {
                let i = sampler.as_ref().expect("RCD sampler").sample(&mut rng);
                rcd_step(&x, rcd_matrix.as_ref().expect("RCD matrix"), b, i)?
            }
            Method::BlockKaczmarz => {
                let rows = index::sample(&mut rng, m, cfg.block_size).into_vec();
                let b_s: Vec<f64> = rows.iter().map(|&i| b[i]).collect();
                block_kaczmarz_step(&x, &a.select_rows(&rows), &b_s)?
            }
            Method::SketchProject => {
                let s = Matrix::from_fn(cfg.block_size, m, |_, _| StandardNormal.sample(&mut rng));
                sketch_project_step_prepared(&x, a, b, &s, None)?
            }
        };
        record(&x)?;
    }
    Ok(SolverRun {
        trace,
        x,
        rht_frobenius,
    })
}

fn rcd_system(a: &Matrix) -> Result<SymmetricMatrix> {
    let s = SymmetricMatrix::new(a.clone())
        .map_err(|_| Error::invalid("coordinate descent needs a symmetric matrix"))?;
    for i in 0..s.dim() {
        if s[(i, i)].is_nan() || s[(i, i)] <= 0.0 {
            return Err(Error::InvalidDiagonal {
                index: i,
                value: s[(i, i)],
            });
        }
    }
    let tol = 1e-10 * a.frobenius_norm();
    s.check_psd(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::random_gaussian_system;

    #[test]
    fn zero_steps_records_initial_point() {
        let sys = random_gaussian_system(5, 3, 1).unwrap();
        let run = run_solver(&sys, &SolverConfig::new(Method::Rk, 3), 0).unwrap();
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.x, vec![0.0; 3]);
    }

    #[test]
    fn scalar_system_solves_in_one_step() {
        let sys = LinearSystem::parse("1 1\n2\n4\n").unwrap();
        for seed in 0..5 {
            let run = run_solver(&sys, &SolverConfig::new(Method::Rk, seed), 1).unwrap();
            assert_eq!(run.x, vec![2.0]);
            assert_eq!(run.trace.dist_sq, vec![4.0, 0.0]);
        }
    }

    #[test]
    fn orthogonal_rows_resolve_after_visiting_all() {
        let sys = LinearSystem::parse("3 3\n2 0 0\n0 1 0\n0 0 3\n2 3 6\n").unwrap();
        let run = run_solver(&sys, &SolverConfig::new(Method::Rk, 8), 200).unwrap();
        assert!(run.trace.residual_sq.last().unwrap() < &1e-16);
    }

    #[test]
    fn all_methods_contract_and_are_deterministic() {
        let sys = random_gaussian_system(16, 6, 2).unwrap();
        let spd = {
            let g = random_gaussian_system(10, 6, 3).unwrap();
            let a = g.a().gram_cols().into_matrix();
            let b = a.mul_vec(&[1.0; 6]).unwrap();
            LinearSystem::new(a, b, Some(vec![1.0; 6])).unwrap()
        };
        let cases = [
            (Method::Rk, 1, false, &sys),
            (Method::Rk, 1, true, &sys),
            (Method::Rcd, 1, false, &spd),
            (Method::BlockKaczmarz, 4, false, &sys),
            (Method::BlockKaczmarz, 4, true, &sys),
            (Method::SketchProject, 3, false, &sys),
        ];
        for (method, block_size, rht, s) in cases {
            let cfg = SolverConfig {
                method,
                block_size,
                seed: 17,
                rht,
            };
            let r1 = run_solver(s, &cfg, 300).unwrap();
            let r2 = run_solver(s, &cfg, 300).unwrap();
            assert_eq!(r1.trace, r2.trace);
            let d = &r1.trace.dist_sq;
            if method != Method::Rcd {
                for (t, w) in d.windows(2).enumerate() {
                    let slack = 1e-10 * d[0].sqrt();
                    assert!(w[1].sqrt() <= w[0].sqrt() + slack, "{method} t={t} {w:?}");
                }
            }
            assert!(
                d.last().unwrap() < &(1e-3 * d[0]),
                "{method} did not converge"
            );
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let sys = random_gaussian_system(4, 2, 1).unwrap();
        let run = run_solver(&sys, &SolverConfig::new(Method::Rk, 1), 5).unwrap();
        let mut buf = Vec::new();
        run.trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("t,dist_sq,residual_sq,mnorm_sq\n0,"));
    }

    #[test]
    fn rejects_bad_configs() {
        let sys = random_gaussian_system(4, 2, 1).unwrap();
        let mut cfg = SolverConfig::new(Method::BlockKaczmarz, 1);
        cfg.block_size = 5;
        assert!(run_solver(&sys, &cfg, 1).is_err());
        assert!(run_solver(&sys, &SolverConfig::new(Method::Rcd, 1), 1).is_err());
        assert!("nope".parse::<Method>().is_err());
    }
}
