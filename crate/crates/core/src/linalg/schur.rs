//! Complex Schur decomposition, reordering and dense eigenpairs.

use super::dense::{norm_fro, CMat, CVec, C64, ONE, ZERO};
use crate::error::{NepError, Result};
use ndarray::ArrayView2;

/// Givens rotation with real cosine: `[c s; -conj(s) c] [x; y] = [r; 0]`.
#[derive(Debug, Clone, Copy)]
pub struct Givens {
    pub c: f64,
    pub s: C64,
}

impl Givens {
    pub fn new(x: C64, y: C64) -> Self {
        let ay = y.norm();
        if ay == 0.0 {
            return Givens { c: 1.0, s: ZERO };
        }
        let ax = x.norm();
        if ax == 0.0 {
            return Givens { c: 0.0, s: y.conj() / ay };
        }
        let nrm = ax.hypot(ay);
        Givens { c: ax / nrm, s: (x / ax) * y.conj() / nrm }
    }

    /// Rows `i`, `k` of `a` for columns in `cols`.
    pub fn rotate_rows(&self, a: &mut CMat, i: usize, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let (x, y) = (a[[i, j]], a[[k, j]]);
            a[[i, j]] = x * self.c + self.s * y;
            a[[k, j]] = y * self.c - self.s.conj() * x;
        }
    }

    /// Columns `i`, `k` of `a` multiplied by the adjoint rotation, rows in `rows`.
    pub fn rotate_cols(&self, a: &mut CMat, i: usize, k: usize, rows: std::ops::Range<usize>) {
        for r in rows {
            let (x, y) = (a[[r, i]], a[[r, k]]);
            a[[r, i]] = x * self.c + self.s.conj() * y;
            a[[r, k]] = y * self.c - self.s * x;
        }
    }
}

/// Householder reduction to upper Hessenberg form, `A = Q H Q^*`.
pub fn hessenberg(a: &ArrayView2<C64>) -> (CMat, CMat) {
    let n = a.nrows();
    let mut h = a.to_owned();
    let mut q = super::dense::eye(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[[i, k]]).collect();
        let alpha = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        v[0] += phase * alpha;
        let vn2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vn2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vn2;
        // H <- (I - tau v v^*) H
        for j in 0..n {
            let s: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * h[[k + 1 + t, j]]).sum();
            let s = s * tau;
            for (t, vi) in v.iter().enumerate() {
                h[[k + 1 + t, j]] -= vi * s;
            }
        }
        // H <- H (I - tau v v^*), Q <- Q (I - tau v v^*)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: C64 = v.iter().enumerate().map(|(t, vi)| m[[i, k + 1 + t]] * vi).sum();
                let s = s * tau;
                for (t, vi) in v.iter().enumerate() {
                    m[[i, k + 1 + t]] -= s * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            h[[i, k]] = ZERO;
        }
    }
    (h, q)
}

/// Complex Schur form `A = Z T Z^*` by shifted QR on the Hessenberg form.
pub fn schur(a: &ArrayView2<C64>) -> Result<(CMat, CMat)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(NepError::Dimension("Schur of a non-square matrix".into()));
    }
    let (mut t, mut z) = hessenberg(a);
    if n <= 1 {
        return Ok((t, z));
    }
    let anorm = norm_fro(&t.view()).max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let max_total = 30 * n.max(10);
    let mut total = 0usize;
    let mut ihi = n - 1;
    let mut its = 0usize;
    while ihi > 0 {
        // deflation search
        let mut l = ihi;
        while l > 0 {
            let s = t[[l - 1, l - 1]].norm() + t[[l, l]].norm();
            let s = if s == 0.0 { anorm } else { s };
            if t[[l, l - 1]].norm() <= eps * s {
                t[[l, l - 1]] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == ihi {
            ihi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > max_total {
            return Err(NepError::NoConvergence(format!("QR iteration exceeded {max_total} sweeps")));
        }
        let mu = if its % 10 == 0 {
            t[[ihi, ihi]] + C64::new(0.75 * t[[ihi, ihi - 1]].norm(), 0.0)
        } else {
            let a11 = t[[ihi - 1, ihi - 1]];
            let a12 = t[[ihi - 1, ihi]];
            let a21 = t[[ihi, ihi - 1]];
            let a22 = t[[ihi, ihi]];
            let half = (a11 - a22) * 0.5;
            let disc = (half * half + a12 * a21).sqrt();
            let m1 = (a11 + a22) * 0.5 + disc;
            let m2 = (a11 + a22) * 0.5 - disc;
            if (m1 - a22).norm() < (m2 - a22).norm() {
                m1
            } else {
                m2
            }
        };
        let mut x = t[[l, l]] - mu;
        let mut y = t[[l + 1, l]];
        for k in l..ihi {
            if k > l {
                x = t[[k, k - 1]];
                y = t[[k + 1, k - 1]];
            }
            let g = Givens::new(x, y);
            let c0 = if k > l { k - 1 } else { k };
            g.rotate_rows(&mut t, k, k + 1, c0..n);
            let rmax = (k + 3).min(ihi + 1);
            g.rotate_cols(&mut t, k, k + 1, 0..rmax);
            g.rotate_cols(&mut z, k, k + 1, 0..n);
            if k > l {
                t[[k + 1, k - 1]] = ZERO;
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            t[[i, j]] = ZERO;
        }
    }
    Ok((t, z))
}

/// Swaps adjacent diagonal entries `k`, `k+1` of the Schur form.
pub fn swap_adjacent(t: &mut CMat, z: &mut CMat, k: usize) {
    let n = t.nrows();
    let t11 = t[[k, k]];
    let t22 = t[[k + 1, k + 1]];
    let g = Givens::new(t[[k, k + 1]], t22 - t11);
    if k + 2 < n {
        g.rotate_rows(t, k, k + 1, k + 2..n);
    }
    g.rotate_cols(t, k, k + 1, 0..k);
    t[[k, k]] = t22;
    t[[k + 1, k + 1]] = t11;
    g.rotate_cols(z, k, k + 1, 0..z.nrows());
}

/// Reorders so that the diagonal entry currently at `order[i]` ends at `i`.
pub fn reorder(t: &mut CMat, z: &mut CMat, order: &[usize]) {
    let n = t.nrows();
    // pos[orig] = current position
    let mut at: Vec<usize> = (0..n).collect(); // at[current] = orig
    for (target, &orig) in order.iter().enumerate() {
        let mut cur = at.iter().position(|&o| o == orig).expect("valid permutation");
        while cur > target {
            swap_adjacent(t, z, cur - 1);
            at.swap(cur - 1, cur);
            cur -= 1;
        }
    }
}

/// Eigenvectors of an upper triangular matrix (columns, unit 2-norm).
pub fn triangular_eigvecs(t: &ArrayView2<C64>) -> CMat {
    let n = t.nrows();
    let tnorm = norm_fro(t).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut v = CMat::zeros((n, n));
    for k in 0..n {
        let lam = t[[k, k]];
        let mut x = vec![ZERO; k + 1];
        x[k] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[[i, j]] * x[j];
            }
            let mut d = t[[i, i]] - lam;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            x[i] = -s / d;
        }
        let nrm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..=k {
            v[[i, k]] = x[i] / nrm;
        }
    }
    v
}

/// All eigenpairs `(λ, v)` with unit `v`.
pub fn dense_eig(a: &ArrayView2<C64>) -> Result<Vec<(C64, CVec)>> {
    let (t, z) = schur(a)?;
    let y = triangular_eigvecs(&t.view());
    let v = z.dot(&y);
    let n = a.nrows();
    Ok((0..n)
        .map(|k| {
            let mut col = v.column(k).to_owned();
            super::dense::normalize(&mut col);
            (t[[k, k]], col)
        })
        .collect())
}

pub fn eigvals(a: &ArrayView2<C64>) -> Result<Vec<C64>> {
    let (t, _) = schur(a)?;
    Ok((0..t.nrows()).map(|i| t[[i, i]]).collect())
}

/// Eigenpairs of `A x = λ B x` via `B⁻¹A`; `B` must be nonsingular.
pub fn dense_gen_eig(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Result<Vec<(C64, CVec)>> {
    let lu = super::lu::DenseLu::factor(b)?;
    dense_eig(&lu.solve_mat(a).view())
}
