//! Dense linear algebra substrate: matrices, a Jacobi eigensolver, the
//! reference DFT, ridge regression and principal angles.

mod angles;
mod dft;
mod eigen;
mod matrix;
mod ridge;

pub use angles::{principal_angles, ORTHONORMAL_TOL};
pub use dft::{dft, dft_real, idft};
pub use eigen::{sym_eig, EigenDecomposition, DEFAULT_EIG_TOL, MAX_SWEEPS};
pub use matrix::{dot, norm, ComplexMatrix, DenseMatrix};
pub use ridge::{normal_equation_residual, ridge_solve};
