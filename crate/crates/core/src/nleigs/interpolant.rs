//! Rational Newton interpolant `R_d(λ) = Σ b_j(λ) D_j` and its divided differences.

use super::leja::LejaBagby;
use crate::error::{NepError, Result};
use crate::interpol::sparse_sum;
use crate::linalg::dense::{CMat, CVec, C64, ONE, ZERO};
use crate::linalg::lu::inverse;
use crate::linalg::sparse::CsrMatrix;
use crate::nep::NepOperator;

#[derive(Debug, Clone)]
pub enum DividedDifferences {
    /// `d_i^j` per degree `j`, so that `D_j = Σ_i d_i^j A_i`.
    Split(Vec<Vec<C64>>),
    Explicit(Vec<CsrMatrix>),
}

#[derive(Debug, Clone)]
pub struct RationalInterpolant<'a> {
    op: &'a NepOperator,
    /// Nodes and poles `0..=d` with `ξ_d = ∞`.
    pub seq: LejaBagby,
    pub dd: DividedDifferences,
    /// Norm estimates `δ^j` used for the degree choice.
    pub deltas: Vec<f64>,
    /// Degree selection stopped at the cap without meeting the tolerance.
    pub hit_cap: bool,
}

/// `β_0 f_i(H K⁻¹) e_1` for every term, with the bidiagonal `H`, `K` of `seq`.
fn split_coeffs(op: &NepOperator, seq: &LejaBagby) -> Result<Vec<Vec<C64>>> {
    let m = seq.len();
    let mut h = CMat::zeros((m, m));
    let mut k = CMat::zeros((m, m));
    for j in 0..m {
        h[[j, j]] = seq.nodes[j];
        k[[j, j]] = ONE;
        if j + 1 < m {
            h[[j + 1, j]] = C64::new(seq.beta[j + 1], 0.0);
            k[[j + 1, j]] = seq.poles[j + 1].map_or(ZERO, |x| seq.beta[j + 1] / x);
        }
    }
    let hk = h.dot(&inverse(&k.view())?);
    let mut out = vec![vec![ZERO; op.num_terms()]; m];
    for (i, f) in op.functions().iter().enumerate() {
        let fm = f.eval_matrix_capped(&hk, m.max(crate::scalarfn::DEFAULT_MATFUN_CAP))?;
        for (j, row) in out.iter_mut().enumerate() {
            row[i] = fm[[j, 0]] * seq.beta[0];
        }
    }
    Ok(out)
}

/// First `j ≥ 1` with `δ^j < tol δ^0`.
fn first_small(deltas: &[f64], tol: f64) -> Option<usize> {
    (1..deltas.len()).find(|&j| deltas[j] < tol * deltas[0])
}

impl<'a> RationalInterpolant<'a> {
    /// Divided differences over `seq` (of length `d_max + 1`), choosing the
    /// smallest degree `d ≥ 2` whose last difference is below `dd_tol`
    /// relative to the first. The last pole is then moved to infinity.
    pub fn build(op: &'a NepOperator, seq: &LejaBagby, dd_tol: f64, d_max: usize) -> Result<Self> {
        if seq.len() < d_max + 1 || d_max < 2 {
            return Err(NepError::InvalidInput(format!("need d_max ≥ 2 and {} nodes", d_max + 1)));
        }
        for i in 0..=d_max {
            for j in 0..i {
                if seq.nodes[i] == seq.nodes[j] {
                    return Err(NepError::InvalidInput("interpolation nodes must be distinct".into()));
                }
            }
        }
        if op.is_split() {
            let full = split_coeffs(op, &seq.truncated(d_max))?;
            let deltas: Vec<f64> = full.iter().map(|c| c.iter().map(|v| v.norm()).fold(0.0, f64::max)).collect();
            let hit = first_small(&deltas, dd_tol);
            let d = hit.unwrap_or(d_max).max(2);
            let seq = seq.truncated(d);
            let coeffs = split_coeffs(op, &seq)?;
            Ok(RationalInterpolant {
                op,
                seq,
                dd: DividedDifferences::Split(coeffs),
                deltas: deltas[..=d].to_vec(),
                hit_cap: hit.is_none(),
            })
        } else {
            let mut mats: Vec<CsrMatrix> = Vec::new();
            let mut t0 = op.assemble(seq.nodes[0])?;
            t0.scale(C64::new(seq.beta[0], 0.0));
            let mut deltas = vec![t0.norm_inf()];
            mats.push(t0);
            let mut hit = None;
            for j in 1..=d_max {
                let s = seq.nodes[j];
                let b = seq.basis(s);
                let mut dj = op.assemble(s)?.axpy(-ONE, &sparse_sum(&b[..j], &mats)?, crate::linalg::PatternHint::Different)?;
                dj.scale(ONE / b[j]);
                deltas.push(dj.norm_inf());
                mats.push(dj);
                if hit.is_none() && deltas[j] < dd_tol * deltas[0] {
                    hit = Some(j);
                }
                if hit.is_some_and(|h| j >= h.max(2)) {
                    break;
                }
            }
            let d = hit.unwrap_or(d_max).max(2);
            mats.truncate(d + 1);
            deltas.truncate(d + 1);
            let old = seq.basis(seq.nodes[d])[d];
            let seq = seq.truncated(d);
            let new = seq.basis(seq.nodes[d])[d];
            mats[d].scale(old / new);
            Ok(RationalInterpolant { op, seq, dd: DividedDifferences::Explicit(mats), deltas, hit_cap: hit.is_none() })
        }
    }

    pub fn op(&self) -> &'a NepOperator {
        self.op
    }

    pub fn degree(&self) -> usize {
        self.seq.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `D_j` as a sparse matrix.
    pub fn matrix(&self, j: usize) -> Result<CsrMatrix> {
        match &self.dd {
            DividedDifferences::Split(c) => self.op.combine(&c[j]),
            DividedDifferences::Explicit(m) => Ok(m[j].clone()),
        }
    }

    /// `R_d(λ)` assembled.
    pub fn eval(&self, lambda: C64) -> Result<CsrMatrix> {
        let b = self.seq.basis(lambda);
        match &self.dd {
            DividedDifferences::Split(c) => {
                let mut w = vec![ZERO; self.op.num_terms()];
                for (bj, cj) in b.iter().zip(c) {
                    for (wi, ci) in w.iter_mut().zip(cj) {
                        *wi += bj * ci;
                    }
                }
                self.op.combine(&w)
            }
            DividedDifferences::Explicit(m) => sparse_sum(&b, m),
        }
    }

    /// `Σ_j D_j v_j` over the given `(j, v_j)`; split forms never build `D_j`.
    pub fn apply_sum(&self, terms: &[(usize, CVec)]) -> CVec {
        let n = self.dim();
        match &self.dd {
            DividedDifferences::Split(c) => {
                let mut w = vec![CVec::zeros(n); self.op.num_terms()];
                for (j, v) in terms {
                    for (wi, ci) in w.iter_mut().zip(&c[*j]) {
                        if *ci != ZERO {
                            wi.scaled_add(*ci, v);
                        }
                    }
                }
                let mut y = CVec::zeros(n);
                for (a, wi) in self.op.matrices().iter().zip(&w) {
                    a.apply_add(ONE, &wi.view(), &mut y);
                }
                y
            }
            DividedDifferences::Explicit(m) => {
                let mut y = CVec::zeros(n);
                for (j, v) in terms {
                    m[*j].apply_add(ONE, &v.view(), &mut y);
                }
                y
            }
        }
    }

    /// `D_j^* v`
    pub fn apply_adjoint(&self, j: usize, v: &CVec) -> CVec {
        match &self.dd {
            DividedDifferences::Split(c) => self.op.apply_combination_adjoint(&c[j], v),
            DividedDifferences::Explicit(m) => m[j].apply_adjoint(&v.view()),
        }
    }
}
