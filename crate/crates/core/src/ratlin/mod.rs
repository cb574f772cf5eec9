//! Exact rational linear algebra: scalars, dense vectors and matrices,
//! canonical subspaces.
//!
//! Everything here is exact. Elimination runs fraction-free on integer rows
//! (see [`rref`]), and a [`Subspace`] is identified with its reduced
//! row-echelon basis so that subspace equality is plain `==`.

mod matrix;
mod scalar;
mod subspace;

pub use matrix::{rref, Matrix, Vector};
pub use scalar::{integer_sqrt_exact, rational_sqrt_exact, Scalar};
pub use subspace::{intersect, kernel, solve_linear, Subspace};
