//! Restarted GMRES and BiCGStab with optional Jacobi preconditioning.

use super::dense::{norm2, vdot, CVec, C64, ONE, ZERO};
use super::schur::Givens;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Preconditioner {
    None,
    #[default]
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IterStatus {
    Converged,
    MaxIterations,
    Breakdown,
}

#[derive(Debug, Clone)]
pub struct IterResult {
    pub x: CVec,
    pub status: IterStatus,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl IterResult {
    pub fn converged(&self) -> bool {
        self.status == IterStatus::Converged
    }
}

fn precond(m: Option<&CVec>, v: &CVec) -> CVec {
    match m {
        Some(d) => v * d,
        None => v.clone(),
    }
}

/// GMRES(restart) with right preconditioning `A M⁻¹ u = b`, `x = M⁻¹ u`.
///
/// `minv` holds the inverted diagonal for Jacobi, or `None`.
pub fn gmres<F>(apply: F, b: &CVec, restart: usize, tol: f64, maxit: usize, minv: Option<&CVec>) -> IterResult
where
    F: Fn(&CVec) -> CVec,
{
    let n = b.len();
    let bnorm = norm2(&b.view());
    let mut x = CVec::zeros(n);
    if bnorm == 0.0 {
        return IterResult { x, status: IterStatus::Converged, residual_norm: 0.0, iterations: 0 };
    }
    let m = restart.max(1).min(n.max(1));
    let mut iters = 0;
    let mut r = b - &apply(&x);
    let mut rnorm = norm2(&r.view());
    while iters < maxit {
        if rnorm <= tol * bnorm {
            return IterResult { x, status: IterStatus::Converged, residual_norm: rnorm, iterations: iters };
        }
        let mut v: Vec<CVec> = vec![&r / C64::new(rnorm, 0.0)];
        let mut h: Vec<Vec<C64>> = Vec::new();
        let mut rots: Vec<Givens> = Vec::new();
        let mut g = vec![C64::new(rnorm, 0.0)];
        let mut breakdown = false;
        let mut k_used = 0;
        for k in 0..m {
            if iters >= maxit {
                break;
            }
            iters += 1;
            let z = precond(minv, &v[k]);
            let mut w = apply(&z);
            let mut col = vec![ZERO; k + 2];
            for _ in 0..2 {
                for (j, vj) in v.iter().enumerate() {
                    let hj = vdot(&vj.view(), &w.view());
                    w.scaled_add(-hj, vj);
                    col[j] += hj;
                }
            }
            let beta = norm2(&w.view());
            col[k + 1] = C64::new(beta, 0.0);
            for (j, rot) in rots.iter().enumerate() {
                let (a, bb) = (col[j], col[j + 1]);
                col[j] = a * rot.c + rot.s * bb;
                col[j + 1] = bb * rot.c - rot.s.conj() * a;
            }
            let rot = Givens::new(col[k], col[k + 1]);
            let (a, bb) = (col[k], col[k + 1]);
            col[k] = a * rot.c + rot.s * bb;
            col[k + 1] = ZERO;
            let gk = g[k];
            g[k] = gk * rot.c;
            g.push(-rot.s.conj() * gk);
            rots.push(rot);
            h.push(col);
            k_used = k + 1;
            let est = g[k + 1].norm();
            if beta <= 1e-14 * bnorm {
                breakdown = true;
                break;
            }
            if est <= tol * bnorm {
                break;
            }
            v.push(w / C64::new(beta, 0.0));
        }
        // least squares update
        let mut y = vec![ZERO; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[j][i] * y[j];
            }
            y[i] = s / h[i][i];
        }
        let mut u = CVec::zeros(n);
        for (j, yj) in y.iter().enumerate() {
            u.scaled_add(*yj, &v[j]);
        }
        x = x + precond(minv, &u);
        r = b - &apply(&x);
        rnorm = norm2(&r.view());
        if breakdown && rnorm > tol * bnorm {
            return IterResult { x, status: IterStatus::Breakdown, residual_norm: rnorm, iterations: iters };
        }
    }
    let status = if rnorm <= tol * bnorm { IterStatus::Converged } else { IterStatus::MaxIterations };
    IterResult { x, status, residual_norm: rnorm, iterations: iters }
}

/// BiCGStab with right preconditioning.
pub fn bicgstab<F>(apply: F, b: &CVec, tol: f64, maxit: usize, minv: Option<&CVec>) -> IterResult
where
    F: Fn(&CVec) -> CVec,
{
    let n = b.len();
    let bnorm = norm2(&b.view());
    let mut x = CVec::zeros(n);
    if bnorm == 0.0 {
        return IterResult { x, status: IterStatus::Converged, residual_norm: 0.0, iterations: 0 };
    }
    let mut r = b.clone();
    let rhat = r.clone();
    let (mut rho, mut alpha, mut omega) = (ONE, ONE, ONE);
    let mut v = CVec::zeros(n);
    let mut p = CVec::zeros(n);
    for it in 1..=maxit {
        let rho_new = vdot(&rhat.view(), &r.view());
        if rho_new.norm() <= 1e-300 {
            let rn = norm2(&r.view());
            return IterResult { x, status: IterStatus::Breakdown, residual_norm: rn, iterations: it };
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p = &r + &((&p - &(&v * omega)) * beta);
        let phat = precond(minv, &p);
        v = apply(&phat);
        let denom = vdot(&rhat.view(), &v.view());
        if denom.norm() == 0.0 {
            let rn = norm2(&r.view());
            return IterResult { x, status: IterStatus::Breakdown, residual_norm: rn, iterations: it };
        }
        alpha = rho / denom;
        let s = &r - &(&v * alpha);
        let snorm = norm2(&s.view());
        if snorm <= tol * bnorm {
            x.scaled_add(alpha, &phat);
            let rn = norm2(&(b - &apply(&x)).view());
            let status = if rn <= tol * bnorm { IterStatus::Converged } else { IterStatus::MaxIterations };
            if status == IterStatus::Converged {
                return IterResult { x, status, residual_norm: rn, iterations: it };
            }
            r = b - &apply(&x);
            continue;
        }
        let shat = precond(minv, &s);
        let t = apply(&shat);
        let tt = vdot(&t.view(), &t.view());
        if tt.norm() == 0.0 {
            return IterResult { x, status: IterStatus::Breakdown, residual_norm: snorm, iterations: it };
        }
        omega = vdot(&t.view(), &s.view()) / tt;
        x.scaled_add(alpha, &phat);
        x.scaled_add(omega, &shat);
        r = &s - &(&t * omega);
        let rn = norm2(&r.view());
        if rn <= tol * bnorm {
            let true_r = norm2(&(b - &apply(&x)).view());
            if true_r <= tol * bnorm {
                return IterResult { x, status: IterStatus::Converged, residual_norm: true_r, iterations: it };
            }
        }
        if omega.norm() == 0.0 {
            return IterResult { x, status: IterStatus::Breakdown, residual_norm: rn, iterations: it };
        }
    }
    let rn = norm2(&(b - &apply(&x)).view());
    let status = if rn <= tol * bnorm { IterStatus::Converged } else { IterStatus::MaxIterations };
    IterResult { x, status, residual_norm: rn, iterations: maxit }
}
