//! Dense linear algebra substrate: row-major matrices, a cyclic Jacobi
//! eigensolver for symmetric matrices, and the handful of derived operations
//! the solvers and recursions need.

mod eigen;
mod matrix;
mod ops;

pub use eigen::{sym_eig, EigenPair};
pub use matrix::{Matrix, SymmetricMatrix};
pub use ops::{
    axpy, dot, ensure_finite, m_norm_sq, norm_sq, pseudoinverse_apply, row_space_projection,
    spectral_norm, sym_inv_sqrt, sym_sqrt,
};
