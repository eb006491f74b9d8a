use std::io::Write;

use rayon::prelude::*;

use super::{ContractionProcess, ContractionTrace};
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Per-step sample mean and standard error over replicates. `stderr` is
/// `None` for a single replicate.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub mean: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
}

impl Summary {
    fn from_columns(columns: &[&[f64]]) -> Summary {
        let r = columns.len();
        let len = columns[0].len();
        let rf = r as f64;
        // Shifting by the first replicate keeps the mean exact when all
        // replicates agree.
        let mean: Vec<f64> = (0..len)
            .map(|t| {
                let base = columns[0][t];
                base + columns.iter().map(|c| c[t] - base).sum::<f64>() / rf
            })
            .collect();
        let stderr = (r > 1).then(|| {
            (0..len)
                .map(|t| {
                    let ss: f64 = columns.iter().map(|c| (c[t] - mean[t]).powi(2)).sum();
                    (ss / (rf - 1.0)).sqrt() / rf.sqrt()
                })
                .collect()
        });
        Summary { mean, stderr }
    }

    pub fn stderr_at(&self, t: usize) -> f64 {
        self.stderr.as_ref().map_or(0.0, |s| s[t])
    }
}

/// Monte Carlo estimate of the expected trace of a contraction process.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloTrace {
    pub replicates: usize,
    pub norm_sq: Summary,
    pub mnorm_sq: Summary,
    pub avg_mnorm_sq: Summary,
    pub random_iterate_mnorm_sq: Summary,
}

impl MonteCarloTrace {
    pub fn len(&self) -> usize {
        self.norm_sq.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norm_sq.mean.is_empty()
    }

    /// `‖Δ₀‖²`, identical across replicates.
    pub fn initial_norm_sq(&self) -> f64 {
        self.norm_sq.mean[0]
    }

    /// CSV with mean and standard-error columns; standard-error cells are
    /// empty when there is a single replicate.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "t",
            "mean_norm_sq",
            "mean_mnorm_sq",
            "mean_avg_mnorm_sq",
            "stderr_norm_sq",
            "stderr_mnorm_sq",
            "stderr_avg_mnorm_sq",
        ])?;
        let se = |s: &Summary, t: usize| {
            s.stderr
                .as_ref()
                .map_or(String::new(), |v| v[t].to_string())
        };
        for t in 0..self.len() {
            out.write_record([
                t.to_string(),
                self.norm_sq.mean[t].to_string(),
                self.mnorm_sq.mean[t].to_string(),
                self.avg_mnorm_sq.mean[t].to_string(),
                se(&self.norm_sq, t),
                se(&self.mnorm_sq, t),
                se(&self.avg_mnorm_sq, t),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Runs `replicates` independent trajectories, replicate `r` on stream `r`
/// of `seed`, in parallel. Aggregation sums in replicate order, so results do
/// not depend on scheduling.
pub fn monte_carlo(
    p: &ContractionProcess,
    steps: usize,
    replicates: usize,
    seed: u64,
) -> Result<MonteCarloTrace> {
    if replicates == 0 {
        return Err(Error::invalid("at least one replicate is required"));
    }
    let traces: Vec<ContractionTrace> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| p.trajectory(steps, &mut stream_rng(seed, r)))
        .collect::<Result<_>>()?;
    let column = |f: fn(&ContractionTrace) -> &[f64]| -> Summary {
        let cols: Vec<&[f64]> = traces.iter().map(f).collect();
        Summary::from_columns(&cols)
    };
    Ok(MonteCarloTrace {
        replicates,
        norm_sq: column(|t| &t.norm_sq),
        mnorm_sq: column(|t| &t.mnorm_sq),
        avg_mnorm_sq: column(|t| &t.avg_mnorm_sq),
        random_iterate_mnorm_sq: column(|t| &t.random_iterate_mnorm_sq),
    })
}

/// A step where a Monte Carlo mean exceeds its bound by more than the
/// allowed number of standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct Exceedance {
    pub t: usize,
    pub mean: f64,
    pub bound: f64,
    pub stderr: f64,
}

/// Steps `t` in `ts` where `mean_t > bound(t) + k_sigma * stderr_t`.
pub fn exceedances(
    s: &Summary,
    ts: impl IntoIterator<Item = usize>,
    bound: impl Fn(usize) -> f64,
    k_sigma: f64,
) -> Vec<Exceedance> {
    ts.into_iter()
        .filter_map(|t| {
            let (mean, b, se) = (s.mean[t], bound(t), s.stderr_at(t));
            (mean > b + k_sigma * se).then_some(Exceedance {
                t,
                mean,
                bound: b,
                stderr: se,
            })
        })
        .collect()
}

/// Outcome of comparing averaged and random-iterate curves against
/// `‖Δ₀‖² / (t + 1)`.
#[derive(Clone, Debug)]
pub struct AveragedBoundReport {
    pub initial_norm_sq: f64,
    pub averaged: Vec<Exceedance>,
    pub random_iterate: Vec<Exceedance>,
}

impl AveragedBoundReport {
    pub fn passed(&self) -> bool {
        self.averaged.is_empty() && self.random_iterate.is_empty()
    }
}

/// Flags every `t` where the mean averaged-iterate M-norm, or the mean
/// random-iterate M-norm, exceeds `‖Δ₀‖²/(t+1)` by more than 3 standard
/// errors.
pub fn check_averaged_bound(mc: &MonteCarloTrace) -> AveragedBoundReport {
    let d0 = mc.initial_norm_sq();
    let bound = |t: usize| d0 / (t as f64 + 1.0);
    AveragedBoundReport {
        initial_norm_sq: d0,
        averaged: exceedances(&mc.avg_mnorm_sq, 0..mc.len(), bound, 3.0),
        random_iterate: exceedances(&mc.random_iterate_mnorm_sq, 0..mc.len(), bound, 3.0),
    }
}
