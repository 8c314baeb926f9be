use super::{deflated_loop, start_vector, Single};
use crate::deflation::{ExtSolver, Extended, InvariantPair};
use crate::error::{NepError, Result};
use crate::linalg::dense::{normalize, CVec};
use crate::linalg::geneig::gen_eig_smallest_op;
use crate::nep::{EigenSolution, NepOperator, Settings, SolveStats};
use ndarray::s;
use std::rc::Rc;
use std::time::Instant;

#[derive(Debug, Clone, Default)]
pub struct SlpOptions {
    /// Switch to the undeflated problem once `η` drops below this (0 = never).
    pub deflation_threshold: f64,
    /// Tolerance of the inner linear eigensolve; default `min(1e-9, tol/10)`.
    pub inner_tol: Option<f64>,
    pub initial_vector: Option<CVec>,
}

pub const DEFAULT_MAX_IT: usize = 100;

/// Successive linear problems: `λ ← λ − μ` with `μ` the smallest eigenvalue of
/// `T(λ)x = μT′(λ)x`.
pub fn slp_solve(op: &NepOperator, settings: &Settings, opts: &SlpOptions) -> Result<EigenSolution> {
    let inner_tol = opts.inner_tol.unwrap_or((settings.tol / 10.0).min(1e-9));
    let max_it = settings.max_it_or(DEFAULT_MAX_IT);
    let n = op.dim();
    let empty = InvariantPair::empty(n);
    deflated_loop(op, settings, |pair, stats: &mut SolveStats| {
        let mut z = start_vector(n, pair.k(), settings.seed, opts.initial_vector.as_ref());
        let mut lambda = settings.target;
        let mut cur = pair;
        for it in 0..=max_it {
            let (z1, z2) = (z.slice(s![0..n]).to_owned(), z.slice(s![n..]).to_owned());
            if it > 0 {
                let xhat = cur.recover(lambda, &z1, &z2)?;
                let eta = settings.error(op, lambda, &xhat)?;
                if eta < settings.tol {
                    return Ok(Single { lambda, x: z1, t: z2 });
                }
                if cur.k() > 0 && eta < opts.deflation_threshold {
                    cur = &empty;
                    z = xhat;
                    normalize(&mut z);
                }
            }
            if it == max_it {
                break;
            }
            let t0 = Instant::now();
            let fact = Rc::new(settings.linear_solver.setup(op.assemble(lambda)?)?);
            stats.setup_seconds += t0.elapsed().as_secs_f64();
            stats.factorizations += 1;
            let es = ExtSolver::new(op, cur, lambda, fact.clone())?;
            let ext = Extended::new(op, cur);
            let res = gen_eig_smallest_op(ext.dim(), |v| es.solve(v), |v| ext.apply(lambda, v, true), 1, Some(&z), inner_tol)?;
            stats.linear_solves += fact.solve_count();
            let (mu, znew) = res.into_iter().next().ok_or_else(|| NepError::NoConvergence("empty linear eigensolve".into()))?;
            lambda -= mu;
            z = znew;
            stats.iterations += 1;
            stats.history.push(vec![lambda]);
        }
        Err(NepError::NoConvergence(format!("SLP did not converge in {max_it} iterations")))
    })
}
