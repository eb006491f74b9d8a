use rand::Rng as _;

use super::validate_contraction;
use crate::linalg::{axpy, dot, norm_sq, sym_sqrt, Matrix, SymmetricMatrix};
use crate::rng::Rng;
use crate::solvers::RowSampler;
use crate::{Error, Result};

/// One sampled contraction `M_t`, in the cheapest form that can apply it.
#[derive(Clone, Debug)]
pub enum Contraction<'a> {
    /// Orthogonal projection `a aᵀ / ‖a‖²`.
    RankOne {
        direction: &'a [f64],
        norm_sq: f64,
    },
    /// `diag(d)`.
    Diagonal(Vec<f64>),
    Dense(&'a SymmetricMatrix),
}

impl Contraction<'_> {
    /// `Δ ← (I - M) Δ`.
    pub fn apply(&self, delta: &mut [f64]) {
        match self {
            Contraction::RankOne { direction, norm_sq } => {
                let c = dot(direction, delta) / norm_sq;
                axpy(-c, direction, delta);
            }
            Contraction::Diagonal(d) => {
                for (x, m) in delta.iter_mut().zip(d) {
                    *x -= m * *x;
                }
            }
            Contraction::Dense(m) => {
                let md = m
                    .mul_vec(delta)
                    .expect("sampler dimension checked at construction");
                for (x, v) in delta.iter_mut().zip(md) {
                    *x -= v;
                }
            }
        }
    }

    pub fn to_matrix(&self) -> SymmetricMatrix {
        match self {
            Contraction::RankOne { direction, .. } => {
                SymmetricMatrix::rank_one_projection(direction).expect("nonzero direction")
            }
            Contraction::Diagonal(d) => SymmetricMatrix::diagonal(d),
            Contraction::Dense(m) => (*m).clone(),
        }
    }
}

/// Source of i.i.d. contractions with a known mean `M̄`.
pub trait ContractionSampler: Send + Sync {
    fn dim(&self) -> usize;
    fn mbar(&self) -> &SymmetricMatrix;
    fn draw<'a>(&'a self, rng: &mut Rng) -> Contraction<'a>;
}

/// Projections onto the span of row `v_i` of a direction matrix, drawn with
/// probability `∝ ‖v_i‖²`. The mean is `VᵀV / ‖V‖_F²`.
#[derive(Clone, Debug)]
pub struct RankOneSampler {
    directions: Matrix,
    norms: Vec<f64>,
    sampler: RowSampler,
    mbar: SymmetricMatrix,
}

impl RankOneSampler {
    pub fn from_directions(directions: Matrix) -> Result<Self> {
        crate::linalg::ensure_finite(directions.as_slice(), "directions")?;
        let norms: Vec<f64> = (0..directions.rows())
            .map(|i| norm_sq(directions.row(i)))
            .collect();
        let sampler = RowSampler::new(&norms)?;
        let total: f64 = norms.iter().sum();
        let mbar = directions.gram_cols().scale(1.0 / total);
        Ok(RankOneSampler {
            directions,
            norms,
            sampler,
            mbar,
        })
    }

    /// Randomized Kaczmarz on `A`: the process is `Δ_t = x_t - x*` and the
    /// draws match [`crate::solvers::run_solver`] with the same seed.
    pub fn kaczmarz(a: &Matrix) -> Result<Self> {
        RankOneSampler::from_directions(a.clone())
    }

    /// Randomized coordinate descent on a positive definite `A`: directions
    /// are the rows of `A^{1/2}` and the process is `Δ_t = A^{1/2}(x_t - x*)`,
    /// so `M̄ = A / tr(A)`.
    pub fn coordinate_descent(a: &SymmetricMatrix) -> Result<Self> {
        RankOneSampler::from_directions(sym_sqrt(a)?.into_matrix())
    }
}

impl ContractionSampler for RankOneSampler {
    fn dim(&self) -> usize {
        self.directions.cols()
    }

    fn mbar(&self) -> &SymmetricMatrix {
        &self.mbar
    }

    fn draw<'a>(&'a self, rng: &mut Rng) -> Contraction<'a> {
        let i = self.sampler.sample(rng);
        Contraction::RankOne {
            direction: self.directions.row(i),
            norm_sq: self.norms[i],
        }
    }
}

/// Deterministic `M_t = M` for every `t`.
#[derive(Clone, Debug)]
pub struct FixedSampler {
    m: SymmetricMatrix,
}

impl FixedSampler {
    pub fn new(m: SymmetricMatrix) -> Result<Self> {
        validate_contraction(&m)?;
        Ok(FixedSampler { m })
    }
}

impl ContractionSampler for FixedSampler {
    fn dim(&self) -> usize {
        self.m.dim()
    }

    fn mbar(&self) -> &SymmetricMatrix {
        &self.m
    }

    fn draw<'a>(&'a self, _rng: &mut Rng) -> Contraction<'a> {
        Contraction::Dense(&self.m)
    }
}

/// `M_t = diag(ξ_1, ..., ξ_n)` with independent `ξ_k ~ Bernoulli(p_k)`, so
/// `M̄ = diag(p)`.
#[derive(Clone, Debug)]
pub struct BernoulliDiagonalSampler {
    p: Vec<f64>,
    mbar: SymmetricMatrix,
}

impl BernoulliDiagonalSampler {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("spectrum must be non-empty"));
        }
        if let Some(v) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("probability {v} outside [0, 1]")));
        }
        let mbar = SymmetricMatrix::diagonal(&p);
        Ok(BernoulliDiagonalSampler { p, mbar })
    }
}

impl ContractionSampler for BernoulliDiagonalSampler {
    fn dim(&self) -> usize {
        self.p.len()
    }

    fn mbar(&self) -> &SymmetricMatrix {
        &self.mbar
    }

    fn draw<'a>(&'a self, rng: &mut Rng) -> Contraction<'a> {
        Contraction::Diagonal(
            self.p
                .iter()
                .map(|&pk| if rng.random::<f64>() < pk { 1.0 } else { 0.0 })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eig;
    use crate::rng::stream_rng;

    /// Every draw is a contraction and the entrywise empirical mean over
    /// 10⁴ draws is within 5 standard errors of `M̄`.
    fn check_sampler(s: &dyn ContractionSampler, seed: u64) {
        let n = s.dim();
        let draws = 10_000;
        let mut rng = stream_rng(seed, 0);
        let mut sum = vec![0.0; n * n];
        let mut sum_sq = vec![0.0; n * n];
        for k in 0..draws {
            let m = s.draw(&mut rng).to_matrix();
            if k < 200 {
                let e = sym_eig(&m).unwrap();
                assert!(e.values[0] <= 1.0 + 1e-10 && e.values[n - 1] >= -1e-10);
            }
            for (idx, v) in m.matrix().as_slice().iter().enumerate() {
                sum[idx] += v;
                sum_sq[idx] += v * v;
            }
        }
        let d = draws as f64;
        for (idx, target) in s.mbar().matrix().as_slice().iter().enumerate() {
            let mean = sum[idx] / d;
            let var = (sum_sq[idx] / d - mean * mean).max(0.0);
            let se = (var / d).sqrt();
            assert!(
                (mean - target).abs() <= 5.0 * se + 1e-12,
                "entry {idx}: {mean} vs {target}"
            );
        }
    }

    #[test]
    fn kaczmarz_sampler_mean() {
        let a = Matrix::from_fn(7, 3, |i, j| ((i * 5 + j * 3) % 7) as f64 - 2.5);
        let s = RankOneSampler::kaczmarz(&a).unwrap();
        let fro = a.frobenius_norm().powi(2);
        let expect = a.gram_cols().scale(1.0 / fro);
        let diff = s
            .mbar()
            .matrix()
            .sub(expect.matrix())
            .unwrap()
            .frobenius_norm();
        assert!(diff < 1e-14);
        check_sampler(&s, 1);
    }

    #[test]
    fn coordinate_descent_sampler_mean() {
        let g = Matrix::from_fn(6, 4, |i, j| {
            ((i * 7 + j * 2) % 5) as f64 - 2.0 + 0.3 * j as f64
        });
        let a = g.gram_cols();
        let s = RankOneSampler::coordinate_descent(&a).unwrap();
        let expect = a.scale(1.0 / a.trace());
        let diff = s
            .mbar()
            .matrix()
            .sub(expect.matrix())
            .unwrap()
            .frobenius_norm();
        assert!(diff < 1e-12);
        check_sampler(&s, 2);
    }

    #[test]
    fn bernoulli_and_fixed_means() {
        check_sampler(
            &BernoulliDiagonalSampler::new(vec![0.9, 0.5, 0.01]).unwrap(),
            3,
        );
        check_sampler(
            &FixedSampler::new(SymmetricMatrix::diagonal(&[0.3, 1.0])).unwrap(),
            4,
        );
        assert!(BernoulliDiagonalSampler::new(vec![1.2]).is_err());
        assert!(FixedSampler::new(SymmetricMatrix::diagonal(&[2.0])).is_err());
    }
}
