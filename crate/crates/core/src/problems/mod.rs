//! Benchmark generators with reference solutions, and file-based problems.

mod delay;
mod loaded_string;
mod manifest;
mod mmio;

pub use delay::{gen_delay, laplacian, laplacian_eigenvalue, scalar_roots, DelayParams};
pub use loaded_string::{gen_loaded_string, matrices as loaded_string_matrices, LoadedStringParams};
pub use manifest::{load_problem_manifest, write_problem_manifest, ProblemManifest};
pub use mmio::{read_matrix_market, read_matrix_market_str, write_matrix_market};

use crate::linalg::dense::{CVec, C64};
use crate::nep::{Region, Which};

/// Exact (or brute-force) eigenpairs of a generated problem.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub pairs: Vec<(C64, CVec)>,
}

impl Oracle {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    /// The `count` best eigenvalues by `which` relative to `target`.
    pub fn wanted(&self, which: Which, target: C64, count: usize) -> Vec<C64> {
        let mut ev = self.eigenvalues();
        ev.sort_by(|a, b| which.key(*a, target).total_cmp(&which.key(*b, target)));
        ev.truncate(count);
        ev
    }

    /// Eigenvalues inside `region` (real ones tested with a tiny relative margin).
    pub fn in_region(&self, region: &Region) -> Vec<C64> {
        self.eigenvalues().into_iter().filter(|z| region.contains_relaxed(*z, 1e-12)).collect()
    }
}
