use rand::Rng;

use crate::linalg::{norm_sq, Matrix, SymmetricMatrix};
use crate::{Error, Result};

/// Draws an index with probability proportional to fixed nonnegative weights.
#[derive(Clone, Debug)]
pub struct RowSampler {
    cumulative: Vec<f64>,
}

impl RowSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("sampler needs at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::invalid(format!(
                "sampling weight {w} is not finite and >= 0"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("sampling weights sum to zero"));
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        // Pin the last nonzero weight's cumulative value to exactly 1.
        let last = weights.iter().rposition(|&w| w > 0.0).expect("total > 0");
        for c in &mut cumulative[last..] {
            *c = 1.0;
        }
        Ok(RowSampler { cumulative })
    }

    /// Weights `‖a_i‖²`, as used by randomized Kaczmarz.
    pub fn row_norms(a: &Matrix) -> Result<Self> {
        let w: Vec<f64> = (0..a.rows()).map(|i| norm_sq(a.row(i))).collect();
        RowSampler::new(&w)
    }

    /// Weights `A_ii`, as used by randomized coordinate descent.
    pub fn diagonal(a: &SymmetricMatrix) -> Result<Self> {
        let w: Vec<f64> = (0..a.dim()).map(|i| a[(i, i)]).collect();
        RowSampler::new(&w)
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    /// First index whose cumulative weight exceeds a uniform draw in `[0, 1)`.
    /// Zero-weight indices are never returned.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn frequencies_match_weights() {
        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 3.0]]).unwrap();
        let s = RowSampler::row_norms(&a).unwrap();
        let p = s.probabilities();
        let draws = 100_000;
        let mut counts = [0usize; 3];
        let mut rng = stream_rng(5, 0);
        for _ in 0..draws {
            counts[s.sample(&mut rng)] += 1;
        }
        for (c, &pi) in counts.iter().zip(&p) {
            let sd = (draws as f64 * pi * (1.0 - pi)).sqrt();
            assert!(
                (*c as f64 - draws as f64 * pi).abs() <= 3.0 * sd,
                "{counts:?} vs {p:?}"
            );
        }
    }

    #[test]
    fn zero_weights_never_drawn() {
        let s = RowSampler::new(&[0.0, 2.0, 0.0, 1.0, 0.0]).unwrap();
        let mut rng = stream_rng(1, 0);
        for _ in 0..10_000 {
            let i = s.sample(&mut rng);
            assert!(i == 1 || i == 3);
        }
    }

    #[test]
    fn rejects_degenerate_weights() {
        assert!(RowSampler::new(&[0.0, 0.0]).is_err());
        assert!(RowSampler::new(&[1.0, -1.0]).is_err());
        assert!(RowSampler::new(&[]).is_err());
    }
}
