use super::NepOperator;
use crate::error::{NepError, Result};
use crate::linalg::dense::{vdot, CVec, C64, ZERO};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: C64,
    /// Unit right eigenvector.
    pub x: CVec,
    /// Unit left eigenvector (two-sided runs only).
    pub y: Option<CVec>,
    pub eta: f64,
    pub eta_left: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub restarts: usize,
    pub linear_solves: usize,
    pub factorizations: usize,
    /// Approximations per outer iteration.
    #[serde(skip)]
    pub history: Vec<Vec<C64>>,
    /// Relative residual estimates for `history` where the solver provides them.
    #[serde(skip)]
    pub history_residuals: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct EigenSolution {
    pub pairs: Vec<EigenPair>,
    /// Whether all requested eigenpairs met the tolerance.
    pub converged: bool,
    pub stats: SolveStats,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn max_eta(&self) -> f64 {
        self.pairs.iter().map(|p| p.eta).fold(0.0, f64::max)
    }
}

/// Pole part of `T(z)⁻¹ v` from the computed left/right pairs:
/// `Σ x_i (y_i^* v) / (c_i (z − λ_i))` with `c_i = y_i^* T′(λ_i) x_i`.
pub fn apply_resolvent(op: &NepOperator, sol: &EigenSolution, z: C64, v: &CVec) -> Result<CVec> {
    let mut out = CVec::zeros(op.dim());
    for p in &sol.pairs {
        let y = p.y.as_ref().ok_or_else(|| {
            NepError::InvalidInput("resolvent needs left eigenvectors (two-sided solve)".into())
        })?;
        let ci = vdot(&y.view(), &op.apply_deriv(p.lambda, &p.x)?.view());
        if ci == ZERO {
            return Err(NepError::Singular { index: 0 });
        }
        let d = z - p.lambda;
        if d == ZERO {
            return Err(NepError::Pole(format!("resolvent evaluated at eigenvalue {}", p.lambda)));
        }
        let w = vdot(&y.view(), &v.view()) / (ci * d);
        out.scaled_add(w, &p.x);
    }
    Ok(out)
}
