//! Finite-difference oracle for the reduced one-dimensional operator.

mod eigen;
mod grid;
mod operator;

pub use eigen::{dense_eigenvalues, near_zero_eigen, DENSE_LIMIT};
pub use grid::{Grid, GridSpec};
pub use operator::{assemble, residual, residual_with_boundary, Boundary, DiracMatrix};
