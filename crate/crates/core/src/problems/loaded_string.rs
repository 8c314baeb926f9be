//! Vibrating string with an elastically attached mass:
//! `T(λ) = A − λB + λ/(λ − κ/m) C`.

use super::Oracle;
use crate::error::{NepError, Result};
use crate::linalg::dense::{normalize, CMat, C64, ONE, ZERO};
use crate::linalg::schur::dense_gen_eig;
use crate::linalg::sparse::{CsrMatrix, PatternHint};
use crate::nep::NepOperator;
use crate::scalarfn::ScalarFunction;
use ndarray::s;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadedStringParams {
    pub n: usize,
    pub kappa: f64,
    pub mass: f64,
}

impl Default for LoadedStringParams {
    fn default() -> Self {
        LoadedStringParams { n: 100, kappa: 1.0, mass: 1.0 }
    }
}

/// Largest size for which the dense oracle is built.
pub const ORACLE_CAP: usize = 400;

fn tridiag(n: usize, off: f64, d: f64, last: f64) -> CsrMatrix {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        t.push((i, i, C64::new(if i + 1 == n { last } else { d }, 0.0)));
        if i + 1 < n {
            t.push((i, i + 1, C64::new(off, 0.0)));
            t.push((i + 1, i, C64::new(off, 0.0)));
        }
    }
    CsrMatrix::from_triplets(n, n, &t).expect("indices in range")
}

/// `(A, B, C)` of the discretization.
pub fn matrices(p: &LoadedStringParams) -> (CsrMatrix, CsrMatrix, CsrMatrix) {
    let n = p.n;
    let nf = n as f64;
    let a = tridiag(n, -nf, 2.0 * nf, nf);
    let h = 1.0 / (6.0 * nf);
    let b = tridiag(n, h, 4.0 * h, 2.0 * h);
    let c = CsrMatrix::from_triplets(n, n, &[(n - 1, n - 1, C64::new(p.kappa, 0.0))]).expect("in range");
    (a, b, c)
}

pub fn gen_loaded_string(p: &LoadedStringParams) -> Result<(NepOperator, Option<Oracle>)> {
    if p.n < 2 {
        return Err(NepError::InvalidInput("loaded string needs n ≥ 2".into()));
    }
    if !(p.mass != 0.0) {
        return Err(NepError::InvalidInput("mass must be nonzero".into()));
    }
    let sigma = p.kappa / p.mass;
    let (a, b, c) = matrices(p);
    let op = NepOperator::split(
        vec![
            (a.clone(), ScalarFunction::constant(ONE)),
            (b.clone(), ScalarFunction::polynomial(vec![C64::new(-1.0, 0.0), ZERO])),
            (c.clone(), ScalarFunction::rational(vec![ONE, ZERO], vec![ONE, C64::new(-sigma, 0.0)])?),
        ],
        PatternHint::Different,
    )?;
    if p.n > ORACLE_CAP {
        return Ok((op, None));
    }
    Ok((op, Some(oracle(&a, &b, &c, sigma)?)))
}

/// Eigenpairs of `(λ − σ)(A − λB) + λC`, linearized as a `2n` pencil, without the roots at `σ`.
fn oracle(a: &CsrMatrix, b: &CsrMatrix, c: &CsrMatrix, sigma: f64) -> Result<Oracle> {
    let n = a.nrows();
    let (ad, bd, cd) = (a.to_dense(), b.to_dense(), c.to_dense());
    let s = C64::new(sigma, 0.0);
    // λ² M2 + λ M1 + M0
    let m2 = -&bd;
    let m1 = &ad + &(&bd * s) + &cd;
    let m0 = -(&ad * s);
    let mut l = CMat::zeros((2 * n, 2 * n));
    let mut r = CMat::zeros((2 * n, 2 * n));
    for i in 0..n {
        l[[i, n + i]] = ONE;
        r[[i, i]] = ONE;
    }
    l.slice_mut(s![n.., 0..n]).assign(&(-&m0));
    l.slice_mut(s![n.., n..]).assign(&(-&m1));
    r.slice_mut(s![n.., n..]).assign(&m2);
    let mut pairs: Vec<_> = dense_gen_eig(&l.view(), &r.view())?
        .into_iter()
        .filter(|(lam, _)| (lam - s).norm() > 1e-6 * sigma.abs().max(1.0))
        .map(|(lam, v)| {
            let mut x = v.slice(s![0..n]).to_owned();
            normalize(&mut x);
            (lam, x)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.re.total_cmp(&y.0.re));
    Ok(Oracle { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::schur::eigvals;

    #[test]
    fn construction_invariants() {
        let p = LoadedStringParams { n: 12, ..Default::default() };
        let (a, b, c) = matrices(&p);
        for m in [&a, &b] {
            let d = m.to_dense();
            assert_eq!(d, d.t().to_owned());
            assert!(eigvals(&d.view()).unwrap().iter().all(|z| z.re > 0.0));
        }
        assert_eq!(c.nnz(), 1);
    }

    #[test]
    fn oracle_self_consistent() {
        let (op, oracle) = gen_loaded_string(&LoadedStringParams { n: 30, ..Default::default() }).unwrap();
        let oracle = oracle.unwrap();
        assert_eq!(oracle.pairs.len(), 31);
        for (l, x) in &oracle.pairs {
            assert!(op.backward_error(*l, x).unwrap() <= 1e-10, "{l}");
        }
    }
}
