//! Linear solver selection: dense or banded LU, GMRES, BiCGStab.

use super::band::BandLu;
use super::dense::{CVec, C64};
use super::iterative::{bicgstab, gmres, IterResult, Preconditioner};
use super::lu::DenseLu;
use super::sparse::CsrMatrix;
use crate::error::{NepError, Result};
use serde::{Deserialize, Serialize};
use std::cell::Cell;

/// Largest dimension factored as a dense matrix.
pub const DEFAULT_DENSE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum LinearSolver {
    Direct { dense_cap: usize },
    Gmres { restart: usize, tol: f64, maxit: usize, precond: Preconditioner },
    Bicgstab { tol: f64, maxit: usize, precond: Preconditioner },
}

impl Default for LinearSolver {
    fn default() -> Self {
        LinearSolver::Direct { dense_cap: DEFAULT_DENSE_CAP }
    }
}

impl LinearSolver {
    pub fn gmres() -> Self {
        LinearSolver::Gmres { restart: 30, tol: 1e-10, maxit: 10_000, precond: Preconditioner::Jacobi }
    }

    pub fn bicgstab() -> Self {
        LinearSolver::Bicgstab { tol: 1e-10, maxit: 10_000, precond: Preconditioner::Jacobi }
    }

    pub fn is_iterative(&self) -> bool {
        !matches!(self, LinearSolver::Direct { .. })
    }

    /// Same configuration with a different relative tolerance (iterative only).
    /// Relative tolerance of the iterative modes.
    pub fn tol(&self) -> Option<f64> {
        match self {
            LinearSolver::Gmres { tol, .. } | LinearSolver::Bicgstab { tol, .. } => Some(*tol),
            LinearSolver::Direct { .. } => None,
        }
    }

    pub fn with_tol(self, t: f64) -> Self {
        match self {
            LinearSolver::Gmres { restart, maxit, precond, .. } => LinearSolver::Gmres { restart, tol: t, maxit, precond },
            LinearSolver::Bicgstab { maxit, precond, .. } => LinearSolver::Bicgstab { tol: t, maxit, precond },
            d => d,
        }
    }

    /// Factorizes (direct) or prepares (iterative) a solver for `a`.
    pub fn setup(&self, a: CsrMatrix) -> Result<Factorization> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(NepError::Dimension("solver setup needs a square matrix".into()));
        }
        let kind = match *self {
            LinearSolver::Direct { dense_cap } => {
                let (kl, ku) = a.bandwidth();
                if 2 * kl + ku + 1 <= n / 4 || n > dense_cap {
                    if n > dense_cap && 2 * kl + ku + 1 > n / 4 {
                        return Err(NepError::TooLarge { size: n, cap: dense_cap });
                    }
                    Kind::Band(BandLu::factor(&a)?)
                } else {
                    Kind::Dense(DenseLu::factor(&a.to_dense().view())?)
                }
            }
            cfg => {
                let minv = match cfg {
                    LinearSolver::Gmres { precond: Preconditioner::Jacobi, .. }
                    | LinearSolver::Bicgstab { precond: Preconditioner::Jacobi, .. } => {
                        Some(a.diag().mapv(|d| if d.norm() == 0.0 { C64::new(1.0, 0.0) } else { 1.0 / d }))
                    }
                    _ => None,
                };
                Kind::Iterative { a, cfg, minv }
            }
        };
        Ok(Factorization { kind, n, solves: Cell::new(0), last: Cell::new(None), tol: Cell::new(None) })
    }
}

#[derive(Debug)]
enum Kind {
    Dense(DenseLu),
    Band(BandLu),
    Iterative { a: CsrMatrix, cfg: LinearSolver, minv: Option<CVec> },
}

/// A ready-to-use solver for one matrix; counts its solves.
#[derive(Debug)]
pub struct Factorization {
    kind: Kind,
    n: usize,
    solves: Cell<usize>,
    last: Cell<Option<(bool, f64, usize)>>,
    tol: Cell<Option<f64>>,
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_count(&self) -> usize {
        self.solves.get()
    }

    /// Convergence flag, residual and iterations of the last iterative solve.
    pub fn last_iterative(&self) -> Option<(bool, f64, usize)> {
        self.last.get()
    }

    pub fn is_iterative(&self) -> bool {
        matches!(self.kind, Kind::Iterative { .. })
    }

    /// Overrides the relative tolerance of subsequent iterative solves.
    pub fn set_tolerance(&self, tol: f64) {
        self.tol.set(Some(tol));
    }

    fn run_iterative(&self, a: &CsrMatrix, cfg: LinearSolver, minv: Option<&CVec>, b: &CVec, adjoint: bool) -> Result<CVec> {
        let apply = |v: &CVec| if adjoint { a.apply_adjoint(&v.view()) } else { a.apply(&v.view()) };
        let cfg = match self.tol.get() {
            Some(t) => cfg.with_tol(t),
            None => cfg,
        };
        let minv_adj = minv.map(|m| m.mapv(|v| v.conj()));
        let m = if adjoint { minv_adj.as_ref() } else { minv };
        let res: IterResult = match cfg {
            LinearSolver::Gmres { restart, tol, maxit, .. } => gmres(apply, b, restart, tol, maxit, m),
            LinearSolver::Bicgstab { tol, maxit, .. } => bicgstab(apply, b, tol, maxit, m),
            LinearSolver::Direct { .. } => unreachable!(),
        };
        self.last.set(Some((res.converged(), res.residual_norm, res.iterations)));
        if !res.converged() {
            return Err(NepError::NoConvergence(format!(
                "{:?} linear solve stopped after {} iterations with residual {:.3e}",
                res.status, res.iterations, res.residual_norm
            )));
        }
        Ok(res.x)
    }

    pub fn solve(&self, b: &CVec) -> Result<CVec> {
        self.solves.set(self.solves.get() + 1);
        match &self.kind {
            Kind::Dense(lu) => Ok(lu.solve(&b.view())),
            Kind::Band(lu) => Ok(lu.solve(&b.view())),
            Kind::Iterative { a, cfg, minv } => self.run_iterative(a, *cfg, minv.as_ref(), b, false),
        }
    }

    pub fn solve_adjoint(&self, b: &CVec) -> Result<CVec> {
        self.solves.set(self.solves.get() + 1);
        match &self.kind {
            Kind::Dense(lu) => Ok(lu.solve_adjoint(&b.view())),
            Kind::Band(lu) => Ok(lu.solve_adjoint(&b.view())),
            Kind::Iterative { a, cfg, minv } => self.run_iterative(a, *cfg, minv.as_ref(), b, true),
        }
    }
}
