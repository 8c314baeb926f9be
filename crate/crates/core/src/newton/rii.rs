use super::{deflated_loop, warm_start, Single};
use crate::deflation::{ExtSolver, Extended, InvariantPair};
use crate::error::{NepError, Result};
use crate::linalg::dense::{normalize, vdot, CVec, C64, ZERO};
use crate::nep::{EigenSolution, NepOperator, Settings, SolveStats};
use ndarray::s;
use std::rc::Rc;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct RiiOptions {
    /// Use `x^* T(z) x = 0` for the eigenvalue update.
    pub hermitian: bool,
    /// Refactor `T(σ)` at `σ = λ` every `lag` iterations (0 = fixed σ).
    pub lag: usize,
    /// Keep the iterative correction tolerance fixed instead of halving it.
    pub const_correction_tol: bool,
    pub deflation_threshold: f64,
    pub max_inner: usize,
    pub initial_vector: Option<CVec>,
}

impl Default for RiiOptions {
    fn default() -> Self {
        RiiOptions {
            hermitian: false,
            lag: 1,
            const_correction_tol: false,
            deflation_threshold: 0.0,
            max_inner: 10,
            initial_vector: None,
        }
    }
}

pub const DEFAULT_MAX_IT: usize = 200;
const FIRST_CORRECTION_TOL: f64 = 0.1;
/// Inverse-iteration steps applied to a random start vector, so the first
/// scalar Newton solve sees a vector biased towards the target.
const WARMUP_STEPS: usize = 2;

/// Newton iteration on `x^* T(σ)⁻¹ T(z) x = 0` (or `x^* T(z) x = 0`).
/// Returns the iterate and whether `|μ|/|λ| < √ε` was reached.
pub fn rii_scalar_newton(
    ext: &Extended,
    solver: &ExtSolver,
    lambda_start: C64,
    x: &CVec,
    hermitian: bool,
    max_inner: usize,
) -> Result<(C64, bool)> {
    let w = if hermitian { x.clone() } else { solver.solve_adjoint(x)? };
    let tol = f64::EPSILON.sqrt();
    let mut lambda = lambda_start;
    for _ in 0..max_inner {
        let num = vdot(&w.view(), &ext.apply(lambda, x, false)?.view());
        let den = vdot(&w.view(), &ext.apply(lambda, x, true)?.view());
        if den == ZERO {
            return Err(NepError::Singular { index: 0 });
        }
        let mu = num / den;
        lambda -= mu;
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(NepError::NoConvergence("scalar Newton diverged".into()));
        }
        if mu.norm() < tol * lambda.norm().max(f64::MIN_POSITIVE) {
            return Ok((lambda, true));
        }
    }
    Ok((lambda, false))
}

/// Residual inverse iteration.
pub fn rii_solve(op: &NepOperator, settings: &Settings, opts: &RiiOptions) -> Result<EigenSolution> {
    let max_it = settings.max_it_or(DEFAULT_MAX_IT);
    let n = op.dim();
    let empty = InvariantPair::empty(n);
    deflated_loop(op, settings, |pair, stats: &mut SolveStats| {
        let factor = |sigma: C64, stats: &mut SolveStats| -> Result<Rc<_>> {
            let t0 = Instant::now();
            let f = Rc::new(settings.linear_solver.setup(op.assemble(sigma)?)?);
            stats.setup_seconds += t0.elapsed().as_secs_f64();
            stats.factorizations += 1;
            Ok(f)
        };
        let mut cur = pair;
        let mut sigma = settings.target;
        let mut fact = factor(sigma, stats)?;
        let mut x = warm_start(pair, &fact, settings.seed, opts.initial_vector.as_ref(), WARMUP_STEPS)?;
        let mut es = ExtSolver::new(op, cur, sigma, fact.clone())?;
        let mut lambda = sigma;
        let mut corr_tol = FIRST_CORRECTION_TOL;
        for k in 0..max_it {
            // σ = λ⁽ᵏ⁾, the iterate before this step's scalar update
            if opts.lag > 0 && k > 0 && k % opts.lag == 0 && sigma != lambda {
                sigma = lambda;
                stats.linear_solves += fact.solve_count();
                fact = factor(sigma, stats)?;
                es = ExtSolver::new(op, cur, sigma, fact.clone())?;
            }
            let ext = Extended::new(op, cur);
            let (l, _) = rii_scalar_newton(&ext, &es, lambda, &x, opts.hermitian, opts.max_inner)?;
            lambda = l;
            stats.iterations += 1;
            stats.history.push(vec![lambda]);
            let r = ext.apply(lambda, &x, false)?;
            let (x1, x2) = (x.slice(s![0..n]).to_owned(), x.slice(s![n..]).to_owned());
            let xhat = cur.recover(lambda, &x1, &x2)?;
            let eta = settings.error(op, lambda, &xhat)?;
            if eta < settings.tol {
                stats.linear_solves += fact.solve_count();
                return Ok(Single { lambda, x: x1, t: x2 });
            }
            let mut r = r;
            if cur.k() > 0 && eta < opts.deflation_threshold {
                cur = &empty;
                x = xhat;
                normalize(&mut x);
                r = op.apply(lambda, &x)?;
                es = ExtSolver::new(op, cur, sigma, fact.clone())?;
            }
            if fact.is_iterative() {
                let floor = settings.linear_solver.tol().unwrap_or(0.0);
                let t = if opts.const_correction_tol { floor } else { corr_tol.max(floor) };
                fact.set_tolerance(t);
                corr_tol *= 0.5;
            }
            let v = es.solve(&r)?;
            x = x - v;
            if normalize(&mut x) == 0.0 {
                return Err(NepError::Breakdown("RII iterate vanished".into()));
            }
        }
        stats.linear_solves += fact.solve_count();
        Err(NepError::NoConvergence(format!("RII did not converge in {max_it} iterations")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{c, re, ONE};
    use crate::linalg::sparse::{CsrMatrix, PatternHint};
    use crate::linalg::solver::LinearSolver;
    use crate::scalarfn::ScalarFunction;

    fn exp_minus_two() -> NepOperator {
        NepOperator::split(
            vec![
                (CsrMatrix::identity(1), ScalarFunction::exp()),
                (CsrMatrix::identity(1), ScalarFunction::constant(re(-2.0))),
            ],
            PatternHint::Same,
        )
        .unwrap()
    }

    #[test]
    fn scalar_newton_exp() {
        let op = exp_minus_two();
        let pair = InvariantPair::empty(1);
        let fact = Rc::new(LinearSolver::default().setup(op.assemble(ZERO).unwrap()).unwrap());
        let es = ExtSolver::new(&op, &pair, ZERO, fact).unwrap();
        let ext = Extended::new(&op, &pair);
        let (l, ok) = rii_scalar_newton(&ext, &es, ZERO, &CVec::from(vec![ONE]), false, 20).unwrap();
        assert!(ok);
        assert!((l - re(2f64.ln())).norm() < 1e-10);
    }

    #[test]
    fn scalar_newton_linear_one_step() {
        let a = c(2.5, -1.0);
        let op = NepOperator::split(
            vec![(CsrMatrix::identity(1), ScalarFunction::polynomial(vec![ONE, -a]))],
            PatternHint::Same,
        )
        .unwrap();
        let pair = InvariantPair::empty(1);
        let sigma = re(7.0);
        let fact = Rc::new(LinearSolver::default().setup(op.assemble(sigma).unwrap()).unwrap());
        let es = ExtSolver::new(&op, &pair, sigma, fact).unwrap();
        let ext = Extended::new(&op, &pair);
        let (l, _) = rii_scalar_newton(&ext, &es, ZERO, &CVec::from(vec![ONE]), false, 1).unwrap();
        assert!((l - a).norm() < 1e-14);
    }

    #[test]
    fn rii_exp() {
        let sol = rii_solve(&exp_minus_two(), &Settings { tol: 1e-12, ..Settings::new(1) }, &RiiOptions::default()).unwrap();
        assert!(sol.converged);
        assert!((sol.pairs[0].lambda - re(2f64.ln())).norm() < 1e-10);
    }
}
