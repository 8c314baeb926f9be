//! Nonlinear Arnoldi: project onto a growing subspace, solve the small dense
//! problem, expand with a residual-inverse-iteration correction.

use crate::deflation::{ExtSolver, Extended, InvariantPair};
use crate::error::{NepError, Result};
use crate::linalg::dense::{adjoint, normalize, random_vec, vdot, CMat, CVec, C64, ONE};
use crate::linalg::geneig::gen_eig_smallest_dense;
use crate::linalg::orth::orthogonalize;
use crate::linalg::schur::dense_eig;
use crate::nep::{EigenSolution, NepOperator, Settings, SolveStats};
use crate::newton::{deflated_loop, warm_start, Single};
use ndarray::s;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::rc::Rc;
use std::time::Instant;

pub const DEFAULT_MAX_IT: usize = 200;
/// Relative step size at which the projected SLP iteration stops.
pub const PROJECTED_TOL: f64 = 1e-13;
pub const PROJECTED_MAX_IT: usize = 50;
/// Below this relative step, a step that fails to halve counts as stagnation.
const STALL_TOL: f64 = 1e-9;
const WARMUP_STEPS: usize = 2;

/// A small dense nonlinear eigenproblem `M(λ)y = 0`.
pub trait DenseNep {
    fn dim(&self) -> usize;
    fn eval(&self, lambda: C64, deriv: bool) -> Result<CMat>;
}

/// SLP on a dense problem, started from `lambda_start`. Returns `(λ, y)` with unit `y`.
pub fn dense_nep_slp(p: &dyn DenseNep, lambda_start: C64, y0: Option<&CVec>, tol: f64, max_it: usize) -> Result<(C64, CVec)> {
    let mut lambda = lambda_start;
    let mut y = match y0 {
        Some(v) if v.len() == p.dim() => v.clone(),
        _ => CVec::from_elem(p.dim(), ONE),
    };
    let mut prev_step = f64::INFINITY;
    for _ in 0..max_it {
        let m = p.eval(lambda, false)?;
        let md = p.eval(lambda, true)?;
        let (mu, ynew) = match gen_eig_smallest_dense(&m, &md, 1, Some(&y), 1e-13) {
            Ok(mut v) if !v.is_empty() => v.swap_remove(0),
            Ok(_) => return Err(NepError::Singular { index: 0 }),
            // M(λ) exactly singular: λ is already an eigenvalue
            Err(NepError::Singular { .. }) => {
                let mut ev = dense_eig(&m.view())?;
                ev.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
                return Ok((lambda, ev.swap_remove(0).1));
            }
            Err(e) => return Err(e),
        };
        if !mu.re.is_finite() || !mu.im.is_finite() {
            return Err(NepError::Singular { index: 0 });
        }
        lambda -= mu;
        y = ynew;
        let step = mu.norm() / lambda.norm().max(1.0);
        // quadratic convergence has stalled at the rounding floor
        let stalled = step <= STALL_TOL && step > 0.5 * prev_step;
        if step <= tol || stalled {
            normalize(&mut y);
            return Ok((lambda, y));
        }
        prev_step = step;
    }
    Err(NepError::NoConvergence(format!("projected SLP did not converge in {max_it} iterations")))
}

/// `B_i = V₁^* A_i V₁` for a split operator, grown one row and column at a time.
#[derive(Debug, Clone)]
pub struct ProjectedNep {
    mats: Vec<CMat>,
}

impl ProjectedNep {
    pub fn new(op: &NepOperator) -> Self {
        ProjectedNep { mats: vec![CMat::zeros((0, 0)); op.num_terms()] }
    }

    pub fn dim(&self) -> usize {
        self.mats.first().map_or(0, |m| m.nrows())
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    /// Adds the last vector of `basis` (first blocks only).
    pub fn push(&mut self, op: &NepOperator, basis: &[CVec]) {
        let k = basis.len();
        let v = &basis[k - 1];
        for (b, a) in self.mats.iter_mut().zip(op.matrices()) {
            let av = a.apply(&v.view());
            let ahv = a.apply_adjoint(&v.view());
            let mut next = CMat::zeros((k, k));
            next.slice_mut(s![0..k - 1, 0..k - 1]).assign(b);
            for (i, q) in basis.iter().enumerate() {
                next[[i, k - 1]] = vdot(&q.view(), &av.view());
                if i + 1 < k {
                    next[[k - 1, i]] = vdot(&ahv.view(), &q.view());
                }
            }
            *b = next;
        }
    }

    /// Rebuilds from scratch.
    pub fn reset(&mut self, op: &NepOperator, basis: &[CVec]) {
        self.mats = Self::recompute(op, basis);
    }

    pub fn recompute(op: &NepOperator, basis: &[CVec]) -> Vec<CMat> {
        let k = basis.len();
        op.matrices()
            .iter()
            .map(|a| {
                let mut b = CMat::zeros((k, k));
                for (j, v) in basis.iter().enumerate() {
                    let av = a.apply(&v.view());
                    for (i, q) in basis.iter().enumerate() {
                        b[[i, j]] = vdot(&q.view(), &av.view());
                    }
                }
                b
            })
            .collect()
    }

    pub fn combine(&self, op: &NepOperator, lambda: C64, deriv: bool) -> Result<CMat> {
        let c = if deriv { op.deriv_coeffs(lambda)? } else { op.coeffs(lambda)? };
        let k = self.dim();
        let mut m = CMat::zeros((k, k));
        for (b, ci) in self.mats.iter().zip(c) {
            m.scaled_add(ci, b);
        }
        Ok(m)
    }
}

/// `V^* T̃(λ) V` for the current basis of the extended space.
struct Projected<'a> {
    ext: &'a Extended<'a>,
    proj: &'a ProjectedNep,
    basis: CMat,
}

impl DenseNep for Projected<'_> {
    fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn eval(&self, lambda: C64, deriv: bool) -> Result<CMat> {
        let op = self.ext.op;
        let n = op.dim();
        let first = if op.is_split() {
            self.proj.combine(op, lambda, deriv)?
        } else {
            let v1 = self.basis.slice(s![0..n, ..]).to_owned();
            let t = if deriv { op.assemble_deriv(lambda)? } else { op.assemble(lambda)? };
            let mut tv = CMat::zeros(v1.dim());
            for j in 0..v1.ncols() {
                tv.column_mut(j).assign(&t.apply(&v1.column(j)));
            }
            adjoint(&v1.view()).dot(&tv)
        };
        self.ext.project(&self.basis, lambda, deriv, &first)
    }
}

fn stack(basis: &[CVec]) -> CMat {
    let mut m = CMat::zeros((basis[0].len(), basis.len()));
    for (j, v) in basis.iter().enumerate() {
        m.column_mut(j).assign(v);
    }
    m
}

#[derive(Debug, Clone, Default)]
pub struct NArnoldiOptions {
    pub initial_vector: Option<CVec>,
}

pub fn narnoldi_solve(op: &NepOperator, settings: &Settings, opts: &NArnoldiOptions) -> Result<EigenSolution> {
    let max_it = settings.max_it_or(DEFAULT_MAX_IT);
    let ncv = settings.ncv();
    let n = op.dim();
    deflated_loop(op, settings, |pair: &InvariantPair, stats: &mut SolveStats| {
        let sigma = settings.target;
        let t0 = Instant::now();
        let fact = Rc::new(settings.linear_solver.setup(op.assemble(sigma)?)?);
        stats.setup_seconds += t0.elapsed().as_secs_f64();
        stats.factorizations += 1;
        let es = ExtSolver::new(op, pair, sigma, fact.clone())?;
        let ext = Extended::new(op, pair);
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ 0x9e37_79b9 ^ pair.k() as u64);
        let start = warm_start(pair, &fact, settings.seed, opts.initial_vector.as_ref(), WARMUP_STEPS)?;
        let mut basis = vec![start];
        let mut proj = ProjectedNep::new(op);
        let firsts = |b: &[CVec]| -> Vec<CVec> { b.iter().map(|v| v.slice(s![0..n]).to_owned()).collect() };
        if op.is_split() {
            proj.reset(op, &firsts(&basis));
        }
        let mut lambda = sigma;
        let mut y = CVec::from_elem(1, ONE);
        for _ in 0..max_it {
            let p = Projected { ext: &ext, proj: &proj, basis: stack(&basis) };
            let (l, yy) = dense_nep_slp(&p, lambda, Some(&y), PROJECTED_TOL, PROJECTED_MAX_IT)?;
            lambda = l;
            stats.iterations += 1;
            stats.history.push(vec![lambda]);
            let mut u = p.basis.dot(&yy);
            normalize(&mut u);
            let r = ext.apply(lambda, &u, false)?;
            let (u1, u2) = ext.split_vec(&u);
            let xhat = pair.recover(lambda, &u1, &u2)?;
            if settings.error(op, lambda, &xhat)? < settings.tol {
                stats.linear_solves += fact.solve_count();
                return Ok(Single { lambda, x: u1, t: u2 });
            }
            if basis.len() >= ncv {
                // keep only the current Ritz vector
                basis = vec![u];
                y = CVec::from_elem(1, ONE);
                if op.is_split() {
                    proj.reset(op, &firsts(&basis));
                }
                stats.restarts += 1;
            } else {
                y = CVec::zeros(basis.len() + 1);
                y.slice_mut(s![0..basis.len()]).assign(&yy);
            }
            let mut w = es.solve(&r)?;
            let mut o = orthogonalize(&basis, &mut w);
            if o.dependent {
                stats.warnings.push("nonlinear Arnoldi: correction in span, expanding with a random vector".into());
                w = random_vec(&mut rng, n + pair.k());
                o = orthogonalize(&basis, &mut w);
                if o.dependent {
                    return Err(NepError::Breakdown("nonlinear Arnoldi subspace cannot grow".into()));
                }
            }
            w.mapv_inplace(|v| v / o.beta);
            basis.push(w);
            if y.len() != basis.len() {
                y = CVec::zeros(basis.len());
                y[0] = ONE;
            }
            if op.is_split() {
                proj.push(op, &firsts(&basis));
            }
        }
        stats.linear_solves += fact.solve_count();
        Err(NepError::NoConvergence(format!("nonlinear Arnoldi did not converge in {max_it} iterations")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{norm_fro, re, ZERO};
    use crate::linalg::sparse::{CsrMatrix, PatternHint};
    use crate::scalarfn::ScalarFunction;

    fn diag_linear(d: &[f64]) -> NepOperator {
        let dv: Vec<C64> = d.iter().map(|&x| re(x)).collect();
        NepOperator::split(
            vec![
                (CsrMatrix::diagonal(&dv), ScalarFunction::constant(ONE)),
                (CsrMatrix::identity(d.len()), ScalarFunction::polynomial(vec![re(-1.0), ZERO])),
            ],
            PatternHint::Different,
        )
        .unwrap()
    }

    struct Scalar(NepOperator);

    impl DenseNep for Scalar {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, lambda: C64, deriv: bool) -> Result<CMat> {
            let c = if deriv { self.0.deriv_coeffs(lambda)? } else { self.0.coeffs(lambda)? };
            Ok(CMat::from_elem((1, 1), c.iter().sum()))
        }
    }

    #[test]
    fn one_dimensional_projection_is_newton() {
        let op = NepOperator::split(
            vec![
                (CsrMatrix::identity(1), ScalarFunction::exp()),
                (CsrMatrix::identity(1), ScalarFunction::constant(re(-2.0))),
            ],
            PatternHint::Same,
        )
        .unwrap();
        let (l, _) = dense_nep_slp(&Scalar(op), ZERO, None, 1e-14, 50).unwrap();
        assert!((l - re(2f64.ln())).norm() < 1e-13);
    }

    #[test]
    fn linear_diagonal_finds_nearest() {
        let op = diag_linear(&[1.0, 4.0, 9.0]);
        let sol = narnoldi_solve(&op, &Settings { target: re(3.5), tol: 1e-12, ..Settings::new(1) }, &Default::default()).unwrap();
        assert!(sol.converged);
        assert!((sol.pairs[0].lambda - re(4.0)).norm() < 1e-10);
    }

    #[test]
    fn incremental_projection_matches_recompute() {
        let op = diag_linear(&[1.0, 2.0, 3.0, 5.0, 8.0, 13.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut basis: Vec<CVec> = Vec::new();
        let mut proj = ProjectedNep::new(&op);
        for _ in 0..4 {
            let mut w = random_vec(&mut rng, 6);
            let o = orthogonalize(&basis, &mut w);
            w.mapv_inplace(|v| v / o.beta);
            basis.push(w);
            proj.push(&op, &basis);
            for (b, r) in proj.matrices().iter().zip(ProjectedNep::recompute(&op, &basis)) {
                assert!(norm_fro(&(b - &r).view()) <= 1e-12 * norm_fro(&r.view()));
            }
        }
    }
}
