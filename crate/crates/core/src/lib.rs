//! Randomized iterative solvers for consistent linear systems, viewed as
//! stochastic contraction processes `Δ_{t+1} = (I - M_t) Δ_t`.
//!
//! The crate bundles:
//!
//! * [`linalg`]: dense symmetric linear algebra (Jacobi eigensolver, weighted
//!   norms, projections, pseudoinverse).
//! * [`rational`]: exact rational helpers on top of `num-rational`.
//! * [`solvers`]: Kaczmarz, block Kaczmarz, coordinate descent and the general
//!   sketch-and-project update, plus randomized Hadamard preprocessing.
//! * [`process`]: the abstract contraction process and its Monte Carlo harness.
//! * [`recursion`]: the deterministic eigenvalue recursion bounding the
//!   last-iterate rate, rate fitting and the lower-bound spectrum family.
//! * [`certificates`]: exact verification of the rational inequality chains
//!   behind the rate bound, and the floating-point checks that accompany them.
//! * [`cli`]: the `contraction-lab` command-line front end.

pub mod certificates;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod process;
pub mod quadrature;
pub mod rational;
pub mod recursion;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
