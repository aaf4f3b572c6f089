//! Dense matrices, the operator abstraction used by the iterative solvers,
//! and the symmetric eigensolvers.

mod eigen;
mod lanczos;
mod matrix;
mod operator;

pub use eigen::{eig_sym_dense, tridiagonal_eig};
pub use lanczos::{lanczos_top, LanczosOptions, LanczosOutput};
pub use matrix::{axpy, dot, frobenius_distance, norm, normalize, Matrix};
pub use operator::{SymmetricOperator, WeightedAdjacency};
