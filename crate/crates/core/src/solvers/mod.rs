//! Randomized iterative solvers for consistent linear systems `Ax = b`.
//!
//! Each method is a stochastic contraction process on the error
//! `x_t - x*` (or a fixed linear image of it), so its traces can be compared
//! directly with [`crate::process`] and [`crate::recursion`].

mod rht;
mod run;
mod sampler;
mod steps;
mod system;

pub use rht::{fwht, rht_preprocess, rht_with_signs, RHT_STREAM};
pub use run::{run_solver, Method, SolverConfig, SolverRun, SolverTrace};
pub use sampler::RowSampler;
pub use steps::{
    block_kaczmarz_step, kaczmarz_step, rcd_step, sketch_project_step, sketch_project_step_prepared,
};
pub use system::{random_gaussian_system, LinearSystem};
