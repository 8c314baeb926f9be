//! Deflation through minimal invariant pairs.
//!
//! Once `(X, H)` is known, further eigenpairs are found as solutions of the
//! extended problem
//!
//! ```text
//! [T(λ) U(λ)] [x]
//! [A(λ) B(λ)] [t] = 0
//! ```
//!
//! whose blocks are applied and solved without forming the `(n+k)`-square matrix.

use crate::error::{NepError, Result};
use crate::linalg::dense::{adjoint, eye, normalize, numerical_rank, CMat, CVec, C64, ONE, ZERO};
use crate::linalg::lu::DenseLu;
use crate::linalg::schur::triangular_eigvecs;
use crate::linalg::solver::Factorization;
use crate::nep::NepOperator;
use crate::scalarfn::ScalarFunction;
use ndarray::{concatenate, s, Axis};
use std::rc::Rc;

pub const P_CAP: usize = 4;
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct InvariantPair {
    n: usize,
    x: CMat,
    h: CMat,
    p: usize,
    // X H^i, i = 0..=p
    xh: Vec<CMat>,
    // (X H^i)^* X, i = 0..=p
    xhx: Vec<CMat>,
    // A_j X for every split term
    ax: Vec<CMat>,
}

/// `f([[H, I], [0, λI]])` top-right block, or the derivative in `λ` of that block.
pub fn eval_phi(f: &ScalarFunction, h: &CMat, lambda: C64, deriv: bool) -> Result<CMat> {
    let k = h.nrows();
    let blocks = if deriv { 3 } else { 2 };
    let m = blocks * k;
    let mut w = CMat::zeros((m, m));
    w.slice_mut(s![0..k, 0..k]).assign(h);
    for b in 1..blocks {
        for i in 0..k {
            w[[b * k + i, b * k + i]] = lambda;
            w[[(b - 1) * k + i, b * k + i]] = ONE;
        }
    }
    let fw = f.eval_matrix(&w)?;
    Ok(fw.slice(s![0..k, (blocks - 1) * k..m]).to_owned())
}

fn powers(z: C64, p: usize) -> Vec<C64> {
    let mut out = vec![ONE; p + 1];
    for i in 1..=p {
        out[i] = out[i - 1] * z;
    }
    out
}

impl InvariantPair {
    pub fn empty(n: usize) -> Self {
        InvariantPair {
            n,
            x: CMat::zeros((n, 0)),
            h: CMat::zeros((0, 0)),
            p: 0,
            xh: Vec::new(),
            xhx: Vec::new(),
            ax: Vec::new(),
        }
    }

    /// Builds a pair directly; `H` must be upper triangular.
    pub fn new(op: &NepOperator, x: CMat, h: CMat) -> Result<Self> {
        let n = x.nrows();
        let k = x.ncols();
        if h.dim() != (k, k) || n != op.dim() {
            return Err(NepError::Dimension("invariant pair blocks do not match".into()));
        }
        let mut pair = InvariantPair { n, x, h, p: 0, xh: Vec::new(), xhx: Vec::new(), ax: Vec::new() };
        pair.refresh(op)?;
        Ok(pair)
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &CMat {
        &self.x
    }

    pub fn h(&self) -> &CMat {
        &self.h
    }

    /// Minimality index.
    pub fn p(&self) -> usize {
        self.p
    }

    fn refresh(&mut self, op: &NepOperator) -> Result<()> {
        let k = self.k();
        if k == 0 {
            self.p = 0;
            self.xh.clear();
            self.xhx.clear();
            self.ax.clear();
            return Ok(());
        }
        let mut xh = vec![self.x.clone()];
        let mut p = 0;
        for cand in 1..=P_CAP {
            if cand > 1 {
                let next = xh[cand - 2].dot(&self.h);
                xh.push(next);
            }
            let stacked = concatenate(Axis(0), &xh.iter().map(|m| m.view()).collect::<Vec<_>>())
                .expect("equal column counts");
            if numerical_rank(&stacked.view(), RANK_TOL) == k {
                p = cand;
                break;
            }
        }
        if p == 0 {
            return Err(NepError::RankDeficient(format!(
                "pair of size {k} is not minimal with index ≤ {P_CAP}"
            )));
        }
        xh.push(xh[p - 1].dot(&self.h));
        self.xhx = xh.iter().map(|m| adjoint(&m.view()).dot(&self.x)).collect();
        self.xh = xh;
        self.p = p;
        self.ax = op
            .matrices()
            .iter()
            .map(|a| {
                let mut out = CMat::zeros((self.n, k));
                for j in 0..k {
                    out.column_mut(j).assign(&a.apply(&self.x.column(j)));
                }
                out
            })
            .collect();
        Ok(())
    }

    /// Appends `(λ, x, t)`; the new column is normalized.
    pub fn extend(&mut self, op: &NepOperator, lambda: C64, x: &CVec, t: &CVec) -> Result<()> {
        let k = self.k();
        if x.len() != self.n || t.len() != k {
            return Err(NepError::Dimension("extension vector sizes".into()));
        }
        let mut xn = x.clone();
        let nrm = normalize(&mut xn);
        if nrm == 0.0 {
            return Err(NepError::RankDeficient("zero extension vector".into()));
        }
        let mut xt = CMat::zeros((self.n, k + 1));
        xt.slice_mut(s![.., 0..k]).assign(&self.x);
        xt.column_mut(k).assign(&xn);
        let mut ht = CMat::zeros((k + 1, k + 1));
        ht.slice_mut(s![0..k, 0..k]).assign(&self.h);
        for i in 0..k {
            ht[[i, k]] = t[i] / nrm;
        }
        ht[[k, k]] = lambda;
        let mut next = InvariantPair { n: self.n, x: xt, h: ht, p: 0, xh: Vec::new(), xhx: Vec::new(), ax: Vec::new() };
        next.refresh(op)?;
        *self = next;
        Ok(())
    }

    /// Eigenpairs of the pair: `λ_j = H_jj`, `x_j = X v_j` normalized.
    pub fn eigenpairs(&self) -> Vec<(C64, CVec)> {
        let v = triangular_eigvecs(&self.h.view());
        (0..self.k())
            .map(|j| {
                let mut x = self.x.dot(&v.column(j));
                normalize(&mut x);
                (self.h[[j, j]], x)
            })
            .collect()
    }

    /// Removes the component of `v` in the range of `X`.
    pub fn project_out(&self, v: &CVec) -> Result<CVec> {
        if self.k() == 0 {
            return Ok(v.clone());
        }
        let c = adjoint(&self.x.view()).dot(v);
        let lu = DenseLu::factor(&self.xhx[0].view()).map_err(|_| NepError::RankDeficient("X^*X is singular".into()))?;
        Ok(v - &self.x.dot(&lu.solve(&c.view())))
    }

    /// `(λI − H)⁻¹` applied to the columns of `b`.
    fn shifted_solve(&self, lambda: C64, b: &CMat) -> Result<CMat> {
        let k = self.k();
        let m = eye(k) * lambda - &self.h;
        let lu = DenseLu::factor(&m.view()).map_err(|_| NepError::Pole(format!("{lambda} is an eigenvalue of H")))?;
        Ok(lu.solve_mat(&b.view()))
    }

    /// Eigenvector of `T` from a solution `(x, t)` of the extended problem: `x + X(λI − H)⁻¹t`.
    pub fn recover(&self, lambda: C64, x: &CVec, t: &CVec) -> Result<CVec> {
        if self.k() == 0 {
            return Ok(x.clone());
        }
        let tm = t.clone().insert_axis(Axis(1));
        let w = self.shifted_solve(lambda, &tm)?;
        Ok(x + &self.x.dot(&w.column(0)))
    }

    /// `U(λ)` (or `U′(λ)`).
    pub fn u_matrix(&self, op: &NepOperator, lambda: C64, deriv: bool) -> Result<CMat> {
        let k = self.k();
        if k == 0 {
            return Ok(CMat::zeros((self.n, 0)));
        }
        if op.is_split() {
            let mut u = CMat::zeros((self.n, k));
            for (f, ax) in op.functions().iter().zip(&self.ax) {
                u = u + ax.dot(&eval_phi(f, &self.h, lambda, deriv)?);
            }
            return Ok(u);
        }
        // callback form: U = T X (λI − H)⁻¹, U′ = T′ X (λI − H)⁻¹ − T X (λI − H)⁻²
        let r = self.shifted_solve(lambda, &eye(k))?;
        let xr = self.x.dot(&r);
        let t = op.assemble(lambda)?;
        let mut u = CMat::zeros((self.n, k));
        if deriv {
            let td = op.assemble_deriv(lambda)?;
            let xrr = xr.dot(&r);
            for j in 0..k {
                let col = td.apply(&xr.column(j)) - t.apply(&xrr.column(j));
                u.column_mut(j).assign(&col);
            }
        } else {
            for j in 0..k {
                u.column_mut(j).assign(&t.apply(&xr.column(j)));
            }
        }
        Ok(u)
    }

    fn a_coeffs(&self, lambda: C64, deriv: bool) -> Vec<C64> {
        let pw = powers(lambda, self.p);
        (0..=self.p)
            .map(|i| if deriv { if i == 0 { ZERO } else { pw[i - 1] * i as f64 } } else { pw[i] })
            .collect()
    }

    /// `A(λ) Z` for an `n × m` block `Z`.
    pub fn a_times(&self, lambda: C64, z: &CMat, deriv: bool) -> CMat {
        let mut out = CMat::zeros((self.k(), z.ncols()));
        for (c, xh) in self.a_coeffs(lambda, deriv).into_iter().zip(&self.xh) {
            if c != ZERO {
                out = out + adjoint(&xh.view()).dot(z) * c;
            }
        }
        out
    }

    /// `B(λ)` (or `B′(λ)`).
    pub fn b_matrix(&self, lambda: C64, deriv: bool) -> CMat {
        let k = self.k();
        let pw = powers(lambda, self.p);
        let mut hp = vec![eye(k)];
        for i in 1..self.p {
            hp.push(hp[i - 1].dot(&self.h));
        }
        let mut b = CMat::zeros((k, k));
        for i in 1..=self.p {
            let mut q = CMat::zeros((k, k));
            for j in 0..i {
                let c = if deriv { if j == 0 { ZERO } else { pw[j - 1] * j as f64 } } else { pw[j] };
                if c != ZERO {
                    q = q + &hp[i - j - 1] * c;
                }
            }
            b = b + self.xhx[i].dot(&q);
        }
        b
    }
}

/// The extended operator for a fixed pair.
pub struct Extended<'a> {
    pub op: &'a NepOperator,
    pub pair: &'a InvariantPair,
}

impl<'a> Extended<'a> {
    pub fn new(op: &'a NepOperator, pair: &'a InvariantPair) -> Self {
        Extended { op, pair }
    }

    pub fn dim(&self) -> usize {
        self.pair.n + self.pair.k()
    }

    pub fn split_vec(&self, z: &CVec) -> (CVec, CVec) {
        let n = self.pair.n;
        (z.slice(s![0..n]).to_owned(), z.slice(s![n..]).to_owned())
    }

    /// `T̃(λ) z` or `T̃′(λ) z`.
    pub fn apply(&self, lambda: C64, z: &CVec, deriv: bool) -> Result<CVec> {
        let n = self.pair.n;
        let k = self.pair.k();
        if z.len() != n + k {
            return Err(NepError::Dimension("extended vector length".into()));
        }
        let (z1, z2) = self.split_vec(z);
        let mut y1 = if deriv { self.op.apply_deriv(lambda, &z1)? } else { self.op.apply(lambda, &z1)? };
        if k == 0 {
            return Ok(y1);
        }
        y1 = y1 + self.pair.u_matrix(self.op, lambda, deriv)?.dot(&z2);
        let z1m = z1.insert_axis(Axis(1));
        let y2 = self.pair.a_times(lambda, &z1m, deriv).column(0).to_owned() + self.pair.b_matrix(lambda, deriv).dot(&z2);
        Ok(concatenate![Axis(0), y1, y2])
    }

    /// Projection `V^* T̃(λ) V` given the first term `V₁^* T(λ) V₁`.
    pub fn project(&self, v: &CMat, lambda: C64, deriv: bool, first: &CMat) -> Result<CMat> {
        let n = self.pair.n;
        let k = self.pair.k();
        if k == 0 {
            return Ok(first.clone());
        }
        let v1 = v.slice(s![0..n, ..]).to_owned();
        let v2 = v.slice(s![n.., ..]).to_owned();
        let u = self.pair.u_matrix(self.op, lambda, deriv)?;
        let v1h = adjoint(&v1.view());
        let v2h = adjoint(&v2.view());
        let mut m = first.clone();
        m = m + v1h.dot(&u).dot(&v2);
        m = m + v2h.dot(&self.pair.a_times(lambda, &v1, deriv));
        m = m + v2h.dot(&self.pair.b_matrix(lambda, deriv)).dot(&v2);
        Ok(m)
    }
}

/// Solves with `T̃(σ)` through the Schur complement `S = B − A T⁻¹ U`.
pub struct ExtSolver {
    fact: Rc<Factorization>,
    k: usize,
    n: usize,
    sigma: C64,
    // T(σ)⁻¹ U(σ)
    w: CMat,
    s_lu: Option<DenseLu>,
    a_rows: Vec<(C64, CMat)>,
    xh: Vec<CMat>,
}

impl ExtSolver {
    pub fn new(op: &NepOperator, pair: &InvariantPair, sigma: C64, fact: Rc<Factorization>) -> Result<Self> {
        let n = pair.n;
        let k = pair.k();
        if k == 0 {
            return Ok(ExtSolver { fact, k, n, sigma, w: CMat::zeros((n, 0)), s_lu: None, a_rows: Vec::new(), xh: Vec::new() });
        }
        let u = pair.u_matrix(op, sigma, false)?;
        let mut w = CMat::zeros((n, k));
        for j in 0..k {
            w.column_mut(j).assign(&fact.solve(&u.column(j).to_owned())?);
        }
        let s_mat = pair.b_matrix(sigma, false) - pair.a_times(sigma, &w, false);
        let s_lu = DenseLu::factor(&s_mat.view()).map_err(|_| NepError::Singular { index: 0 })?;
        let a_rows = pair
            .a_coeffs(sigma, false)
            .into_iter()
            .zip(&pair.xh)
            .map(|(c, xh)| (c, adjoint(&xh.view())))
            .collect();
        Ok(ExtSolver { fact, k, n, sigma, w, s_lu: Some(s_lu), a_rows, xh: pair.xh.clone() })
    }

    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    pub fn factorization(&self) -> &Rc<Factorization> {
        &self.fact
    }

    pub fn solve(&self, b: &CVec) -> Result<CVec> {
        if b.len() != self.n + self.k {
            return Err(NepError::Dimension("extended right-hand side length".into()));
        }
        let b1 = b.slice(s![0..self.n]).to_owned();
        let v = self.fact.solve(&b1)?;
        let Some(s_lu) = &self.s_lu else { return Ok(v) };
        let mut r = b.slice(s![self.n..]).to_owned();
        for (c, xhh) in &self.a_rows {
            r.scaled_add(-*c, &xhh.dot(&v));
        }
        let x2 = s_lu.solve(&r.view());
        let x1 = v - self.w.dot(&x2);
        Ok(concatenate![Axis(0), x1, x2])
    }

    /// Solves with `T̃(σ)^*`.
    pub fn solve_adjoint(&self, c: &CVec) -> Result<CVec> {
        if c.len() != self.n + self.k {
            return Err(NepError::Dimension("extended right-hand side length".into()));
        }
        let mut c1 = c.slice(s![0..self.n]).to_owned();
        let Some(s_lu) = &self.s_lu else { return self.fact.solve_adjoint(&c1) };
        // T̃^* = [[T^*, 0], [U^*, S^*]] [[I, T^{-*}A^*], [0, I]] and U^* T^{-*} = W^*
        let r = c.slice(s![self.n..]).to_owned() - adjoint(&self.w.view()).dot(&c1);
        let w2 = s_lu.solve_adjoint(&r.view());
        for ((coef, _), xh) in self.a_rows.iter().zip(&self.xh) {
            c1.scaled_add(-coef.conj(), &xh.dot(&w2));
        }
        let y1 = self.fact.solve_adjoint(&c1)?;
        Ok(concatenate![Axis(0), y1, w2])
    }
}
