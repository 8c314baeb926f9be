//! Smallest-magnitude eigenpairs of `A x = μ B x` through Arnoldi on `A⁻¹B`.

use super::dense::{CMat, CVec, C64};
use super::krylov::{krylov_schur, FullBasis, KsSettings, RitzSelector};
use super::lu::DenseLu;
use super::schur::dense_eig;
use super::solver::LinearSolver;
use super::sparse::CsrMatrix;
use crate::error::{NepError, Result};

/// Problems up to this size are handled by a dense eigensolve of `A⁻¹B`.
pub const DENSE_THRESHOLD: usize = 24;

struct LargestTheta {
    tol: f64,
}

impl RitzSelector for LargestTheta {
    fn key(&self, theta: C64) -> (bool, f64) {
        (theta.norm() > 0.0, -theta.norm())
    }

    fn accept(&mut self, theta: C64, _x: &CVec, est: f64) -> Result<bool> {
        Ok(est <= self.tol * theta.norm())
    }
}

/// Pencil given through a solve with `A` and a product with `B`.
pub fn gen_eig_smallest_op<S, P>(
    n: usize,
    mut solve_a: S,
    apply_b: P,
    how_many: usize,
    v0: Option<&CVec>,
    tol: f64,
) -> Result<Vec<(C64, CVec)>>
where
    S: FnMut(&CVec) -> Result<CVec>,
    P: Fn(&CVec) -> Result<CVec>,
{
    if how_many == 0 {
        return Ok(Vec::new());
    }
    if n <= DENSE_THRESHOLD {
        let mut m = CMat::zeros((n, n));
        for j in 0..n {
            let mut e = CVec::zeros(n);
            e[j] = C64::new(1.0, 0.0);
            let col = solve_a(&apply_b(&e)?)?;
            m.column_mut(j).assign(&col);
        }
        let mut pairs: Vec<(C64, CVec)> = dense_eig(&m.view())?
            .into_iter()
            .filter(|(t, _)| t.norm() > 1e-14 * (1.0 + super::dense::norm_fro(&m.view())))
            .map(|(t, v)| (1.0 / t, v))
            .collect();
        pairs.sort_by(|a, b| a.0.norm().partial_cmp(&b.0.norm()).unwrap());
        pairs.truncate(how_many);
        return Ok(pairs);
    }
    let start = match v0 {
        Some(v) if super::dense::norm2(&v.view()) > 0.0 => v.clone(),
        _ => CVec::from_elem(n, C64::new(1.0, 0.0)),
    };
    let op = |v: &CVec| solve_a(&apply_b(v)?);
    let mut basis = FullBasis::new(op, &start, 0x5eed)?;
    let mut sel = LargestTheta { tol };
    let ncv = (2 * how_many).max(how_many + 15).min(n);
    let out = krylov_schur(&mut basis, &mut sel, &KsSettings { nev: how_many, ncv, max_restarts: 300 })?;
    if out.converged.len() < how_many {
        return Err(NepError::NoConvergence(format!(
            "Arnoldi on the pencil converged {} of {} pairs",
            out.converged.len(),
            how_many
        )));
    }
    Ok(out
        .converged
        .into_iter()
        .map(|(t, mut x)| {
            super::dense::normalize(&mut x);
            (1.0 / t, x)
        })
        .collect())
}

pub fn gen_eig_smallest_dense(a: &CMat, b: &CMat, how_many: usize, v0: Option<&CVec>, tol: f64) -> Result<Vec<(C64, CVec)>> {
    let lu = DenseLu::factor(&a.view())?;
    gen_eig_smallest_op(a.nrows(), |v| Ok(lu.solve(&v.view())), |v| Ok(b.dot(v)), how_many, v0, tol)
}

pub fn gen_eig_smallest_sparse(
    a: &CsrMatrix,
    b: &CsrMatrix,
    solver: &LinearSolver,
    how_many: usize,
    v0: Option<&CVec>,
    tol: f64,
) -> Result<Vec<(C64, CVec)>> {
    let f = solver.setup(a.clone())?;
    gen_eig_smallest_op(a.nrows(), |v| f.solve(v), |v| Ok(b.apply(&v.view())), how_many, v0, tol)
}
