use super::{NepOperator, Region};
use crate::error::{NepError, Result};
use crate::linalg::dense::{norm2, CVec, C64};
use crate::linalg::solver::LinearSolver;
use serde::{Deserialize, Serialize};

/// Ordering of wanted eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    #[default]
    TargetMagnitude,
    LargestMagnitude,
    LargestReal,
}

impl Which {
    /// Smaller is better.
    pub fn key(&self, lambda: C64, target: C64) -> f64 {
        match self {
            Which::TargetMagnitude => (lambda - target).norm(),
            Which::LargestMagnitude => -lambda.norm(),
            Which::LargestReal => -lambda.re,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemType {
    #[default]
    General,
    Rational,
}

/// Error measure compared against `tol` when deciding convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceTest {
    /// Scaled residual `η(x, λ)`.
    #[default]
    BackwardError,
    /// `‖T(λ)x‖ / (|λ| ‖x‖)`, falling back to absolute when `λ = 0`.
    Relative,
    /// `‖T(λ)x‖ / ‖x‖`
    Absolute,
}

impl ConvergenceTest {
    pub fn error(&self, op: &NepOperator, lambda: C64, x: &CVec) -> Result<f64> {
        if *self == ConvergenceTest::BackwardError {
            return op.backward_error(lambda, x);
        }
        let r = norm2(&op.apply(lambda, x)?.view()) / norm2(&x.view());
        Ok(match self {
            ConvergenceTest::Relative if lambda.norm() > 0.0 => r / lambda.norm(),
            _ => r,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub nev: usize,
    pub ncv: Option<usize>,
    pub tol: f64,
    pub conv: ConvergenceTest,
    pub max_it: Option<usize>,
    pub target: C64,
    pub which: Which,
    pub problem_type: ProblemType,
    pub two_sided: bool,
    pub region: Option<Region>,
    pub linear_solver: LinearSolver,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            nev: 1,
            ncv: None,
            tol: 1e-8,
            conv: ConvergenceTest::BackwardError,
            max_it: None,
            target: C64::new(0.0, 0.0),
            which: Which::TargetMagnitude,
            problem_type: ProblemType::General,
            two_sided: false,
            region: None,
            linear_solver: LinearSolver::default(),
            seed: 0,
        }
    }
}

impl Settings {
    pub fn new(nev: usize) -> Self {
        Settings { nev, ..Default::default() }
    }

    pub fn ncv(&self) -> usize {
        self.ncv.unwrap_or_else(|| (2 * self.nev).max(self.nev + 15))
    }

    pub fn max_it_or(&self, default: usize) -> usize {
        self.max_it.unwrap_or(default)
    }

    /// Error of `(λ, x)` under the configured convergence test.
    pub fn error(&self, op: &NepOperator, lambda: C64, x: &CVec) -> Result<f64> {
        self.conv.error(op, lambda, x)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nev == 0 {
            return Err(NepError::InvalidInput("nev must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(NepError::InvalidInput("tol must be positive".into()));
        }
        if self.ncv() < self.nev + 1 {
            return Err(NepError::InvalidInput(format!("ncv = {} must exceed nev = {}", self.ncv(), self.nev)));
        }
        Ok(())
    }
}
