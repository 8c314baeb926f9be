//! Classical Gram–Schmidt with one unconditional reorthogonalization.

use super::dense::{norm2, vdot, CVec, C64};

/// Relative size below which the orthogonalized vector counts as dependent.
pub const DEPENDENCE_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct Orthogonalized {
    pub h: CVec,
    pub beta: f64,
    pub dependent: bool,
}

/// Orthogonalizes `w` in place against the orthonormal columns `v`.
pub fn orthogonalize(v: &[CVec], w: &mut CVec) -> Orthogonalized {
    let wnorm = norm2(&w.view());
    let mut h = CVec::zeros(v.len());
    for _ in 0..2 {
        let coeffs: Vec<C64> = v.iter().map(|q| vdot(&q.view(), &w.view())).collect();
        for (q, &cf) in v.iter().zip(&coeffs) {
            w.scaled_add(-cf, q);
        }
        for (hi, cf) in h.iter_mut().zip(coeffs) {
            *hi += cf;
        }
    }
    let beta = norm2(&w.view());
    Orthogonalized { h, beta, dependent: beta <= DEPENDENCE_TOL * wnorm || wnorm == 0.0 }
}
