//! Companion-type linearization `𝒜 − λℬ` of `R_d` and the implicit
//! shift-and-invert operator `𝒮 = (𝒜 − σℬ)⁻¹ℬ` with its adjoint.
//!
//! Vectors of the linearization hold `d` blocks of length `n`; an eigenvector
//! for `λ` has blocks `b_j(λ) x`, `j = 0..d−1`.

use super::interpolant::RationalInterpolant;
use crate::error::{NepError, Result};
use crate::linalg::dense::{CMat, CVec, C64, ONE, ZERO};
use crate::linalg::solver::{Factorization, LinearSolver};
use ndarray::s;

pub struct ShiftInvert<'r, 'a> {
    pub ri: &'r RationalInterpolant<'a>,
    pub sigma: C64,
    /// `b_j(σ)`, `j = 0..=d`
    pub c: Vec<C64>,
    /// `σ_{j−1} − σ` at index `j ≥ 1`
    pub alpha: Vec<C64>,
    /// `β_j (1 − σ/ξ_j)` at index `j ≥ 1`
    pub gamma: Vec<C64>,
    /// `β_j / ξ_j` at index `j ≥ 1`
    pub eta: Vec<C64>,
    fact: Factorization,
}

fn block(x: &CVec, n: usize, j: usize) -> CVec {
    x.slice(s![j * n..(j + 1) * n]).to_owned()
}

impl<'r, 'a> ShiftInvert<'r, 'a> {
    /// Factorizes `R_d(σ)`.
    pub fn new(ri: &'r RationalInterpolant<'a>, sigma: C64, solver: &LinearSolver) -> Result<Self> {
        let seq = &ri.seq;
        let d = ri.degree();
        let mut alpha = vec![ZERO; d + 1];
        let mut gamma = vec![ZERO; d + 1];
        let mut eta = vec![ZERO; d + 1];
        for j in 1..=d {
            alpha[j] = seq.nodes[j - 1] - sigma;
            gamma[j] = seq.beta[j] * seq.poles[j].map_or(ONE, |x| 1.0 - sigma / x);
            eta[j] = seq.poles[j].map_or(ZERO, |x| seq.beta[j] / x);
            if gamma[j] == ZERO {
                return Err(NepError::InvalidInput(format!("shift {sigma} is a pole of the interpolant")));
            }
        }
        let fact = solver.setup(ri.eval(sigma)?)?;
        Ok(ShiftInvert { ri, sigma, c: seq.basis(sigma), alpha, gamma, eta, fact })
    }

    pub fn degree(&self) -> usize {
        self.ri.degree()
    }

    pub fn dim(&self) -> usize {
        self.ri.dim() * self.degree()
    }

    pub fn solve_count(&self) -> usize {
        self.fact.solve_count()
    }

    /// Solves the first block row for `z` given the tail blocks `y^1 … y^{d−1}`
    /// (index 0 unused) and the last input block `x^{d−1}`:
    /// `R_d(σ) z = −Σ D_j y^j − D_d (x^{d−1} + (σ − σ_{d−1}) y^{d−1}) / β_d`.
    pub fn head(&self, y: &[CVec], xlast: &CVec) -> Result<CVec> {
        let d = self.degree();
        let mut terms: Vec<(usize, CVec)> = (1..d).map(|j| (j, y[j].clone())).collect();
        let mut last = xlast.clone();
        if d >= 2 {
            last.scaled_add(-self.alpha[d], &y[d - 1]);
        }
        last.mapv_inplace(|v| v / self.ri.seq.beta[d]);
        terms.push((d, last));
        let rhs = -self.ri.apply_sum(&terms);
        self.fact.solve(&rhs)
    }

    /// `𝒮 x`
    pub fn apply(&self, x: &CVec) -> Result<CVec> {
        let (n, d) = (self.ri.dim(), self.degree());
        if x.len() != n * d {
            return Err(NepError::Dimension(format!("vector of length {} for a linearization of size {}", x.len(), n * d)));
        }
        let mut y = vec![CVec::zeros(n); d];
        for j in 1..d {
            let mut r = block(x, n, j - 1);
            r.scaled_add(self.eta[j], &x.slice(s![j * n..(j + 1) * n]));
            r.scaled_add(-self.alpha[j], &y[j - 1]);
            y[j] = r.mapv(|v| v / self.gamma[j]);
        }
        let z = self.head(&y, &block(x, n, d - 1))?;
        let mut w = CVec::zeros(n * d);
        for j in 0..d {
            let mut wj = w.slice_mut(s![j * n..(j + 1) * n]);
            wj.assign(&y[j]);
            wj.scaled_add(self.c[j], &z);
        }
        Ok(w)
    }

    /// First block `R_d(σ)^{-*} Σ conj(b_k(σ)) x^k` of `(𝒜 − σℬ)^{-*} x`.
    pub fn adjoint_head(&self, x: &CVec) -> Result<CVec> {
        let (n, d) = (self.ri.dim(), self.degree());
        let mut acc = CVec::zeros(n);
        for k in 0..d {
            acc.scaled_add(self.c[k].conj(), &x.slice(s![k * n..(k + 1) * n]));
        }
        self.fact.solve_adjoint(&acc)
    }

    /// `𝒮^* x`
    pub fn apply_adjoint(&self, x: &CVec) -> Result<CVec> {
        let (n, d) = (self.ri.dim(), self.degree());
        if x.len() != n * d {
            return Err(NepError::Dimension(format!("vector of length {} for a linearization of size {}", x.len(), n * d)));
        }
        let u0 = self.adjoint_head(x)?;
        let ddu = self.ri.apply_adjoint(d, &u0);
        let mut u = vec![CVec::zeros(n); d];
        if d >= 2 {
            let mut t = block(x, n, d - 1) - self.ri.apply_adjoint(d - 1, &u0);
            t.scaled_add((self.alpha[d] / self.ri.seq.beta[d]).conj(), &ddu);
            u[d - 1] = t.mapv(|v| v / self.gamma[d - 1].conj());
            for k in (1..d - 1).rev() {
                let mut t = block(x, n, k) - self.ri.apply_adjoint(k, &u0);
                t.scaled_add(-self.alpha[k + 1].conj(), &u[k + 1]);
                u[k] = t.mapv(|v| v / self.gamma[k].conj());
            }
        }
        let mut w = CVec::zeros(n * d);
        for k in 0..d {
            let mut wk = if k + 1 < d { u[k + 1].clone() } else { ddu.mapv(|v| -v / self.ri.seq.beta[d]) };
            if k >= 1 {
                wk.scaled_add(self.eta[k].conj(), &u[k]);
            }
            w.slice_mut(s![k * n..(k + 1) * n]).assign(&wk);
        }
        Ok(w)
    }
}

/// Dense `(𝒜, ℬ)` for small instances.
pub fn dense_pencil(ri: &RationalInterpolant) -> Result<(CMat, CMat)> {
    let (n, d) = (ri.dim(), ri.degree());
    let seq = &ri.seq;
    let mut a = CMat::zeros((n * d, n * d));
    let mut b = CMat::zeros((n * d, n * d));
    let dd = ri.matrix(d)?.to_dense();
    for j in 0..d {
        let mut dj = ri.matrix(j)?.to_dense();
        if j == d - 1 {
            dj.scaled_add(-seq.nodes[d - 1] / seq.beta[d], &dd);
        }
        a.slice_mut(s![0..n, j * n..(j + 1) * n]).assign(&dj);
    }
    b.slice_mut(s![0..n, (d - 1) * n..d * n]).assign(&dd.mapv(|v| -v / seq.beta[d]));
    for j in 1..d {
        let eta = seq.poles[j].map_or(ZERO, |x| seq.beta[j] / x);
        for i in 0..n {
            a[[j * n + i, (j - 1) * n + i]] = seq.nodes[j - 1];
            a[[j * n + i, j * n + i]] = C64::new(seq.beta[j], 0.0);
            b[[j * n + i, (j - 1) * n + i]] = ONE;
            b[[j * n + i, j * n + i]] = eta;
        }
    }
    Ok((a, b))
}
