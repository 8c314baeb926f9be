//! Solvers for large sparse nonlinear eigenvalue problems `T(λ)x = 0`.

pub mod deflation;
pub mod error;
pub mod interpol;
pub mod linalg;
pub mod narnoldi;
pub mod nep;
pub mod newton;
pub mod nleigs;
pub mod problems;
pub mod scalarfn;

pub use error::{NepError, Result};
pub use linalg::{CMat, CVec, C64};
