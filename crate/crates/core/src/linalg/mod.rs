//! Dense and sparse kernels used by the solvers.

pub mod band;
pub mod dense;
pub mod geneig;
pub mod iterative;
pub mod krylov;
pub mod lu;
pub mod orth;
pub mod schur;
pub mod solver;
pub mod sparse;

pub use dense::{CMat, CVec, C64};
pub use geneig::{gen_eig_smallest_dense, gen_eig_smallest_op, gen_eig_smallest_sparse};
pub use iterative::{IterResult, IterStatus, Preconditioner};
pub use lu::DenseLu;
pub use orth::orthogonalize;
pub use schur::{dense_eig, schur};
pub use solver::{Factorization, LinearSolver};
pub use sparse::{CsrMatrix, PatternHint};
