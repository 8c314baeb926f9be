//! Time-delay problem `(−λI + A + e^{−τλ}B)x = 0` on a 1-D Dirichlet grid.

use super::Oracle;
use crate::error::{NepError, Result};
use crate::linalg::dense::{normalize, CVec, C64, ONE, ZERO};
use crate::linalg::sparse::{CsrMatrix, PatternHint};
use crate::nep::NepOperator;
use crate::scalarfn::ScalarFunction;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayParams {
    pub n: usize,
    pub tau: f64,
    pub b: f64,
    /// Replace `bI` by a non-constant diagonal (no oracle).
    pub non_commuting: bool,
}

impl Default for DelayParams {
    fn default() -> Self {
        DelayParams { n: 100, tau: 0.001, b: -2.0, non_commuting: false }
    }
}

/// `(n+1)² tridiag(1, −2, 1)`
pub fn laplacian(n: usize) -> CsrMatrix {
    let h2 = ((n + 1) * (n + 1)) as f64;
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        t.push((i, i, C64::new(-2.0 * h2, 0.0)));
        if i + 1 < n {
            t.push((i, i + 1, C64::new(h2, 0.0)));
            t.push((i + 1, i, C64::new(h2, 0.0)));
        }
    }
    CsrMatrix::from_triplets(n, n, &t).expect("indices in range")
}

/// Eigenvalues of [`laplacian`], `μ_k = −4(n+1)² sin²(kπ/(2(n+1)))`.
pub fn laplacian_eigenvalue(n: usize, k: usize) -> f64 {
    let s = (k as f64 * PI / (2.0 * (n + 1) as f64)).sin();
    -4.0 * ((n + 1) * (n + 1)) as f64 * s * s
}

pub fn gen_delay(p: &DelayParams) -> Result<(NepOperator, Option<Oracle>)> {
    let n = p.n;
    if n < 2 {
        return Err(NepError::InvalidInput("delay problem needs n ≥ 2".into()));
    }
    let a = laplacian(n);
    let b = if p.non_commuting {
        let d: Vec<C64> = (0..n).map(|i| C64::new(p.b * (1.0 + (i + 1) as f64 / (n + 1) as f64), 0.0)).collect();
        CsrMatrix::diagonal(&d)
    } else {
        CsrMatrix::diagonal(&vec![C64::new(p.b, 0.0); n])
    };
    let op = NepOperator::split(
        vec![
            (CsrMatrix::identity(n), ScalarFunction::polynomial(vec![C64::new(-1.0, 0.0), ZERO])),
            (a, ScalarFunction::constant(ONE)),
            (b, ScalarFunction::exp().with_scale(C64::new(-p.tau, 0.0), ONE)),
        ],
        PatternHint::Different,
    )?;
    if p.non_commuting {
        return Ok((op, None));
    }
    let mut pairs = Vec::with_capacity(n);
    for k in 1..=n {
        let mu = laplacian_eigenvalue(n, k);
        let mut x: CVec = (1..=n)
            .map(|j| C64::new((k as f64 * j as f64 * PI / (n + 1) as f64).sin(), 0.0))
            .collect();
        normalize(&mut x);
        for lambda in scalar_roots(mu, p.b, p.tau)? {
            pairs.push((lambda, x.clone()));
        }
    }
    Ok((op, Some(Oracle { pairs })))
}

/// Principal root(s) of `−λ + μ + b e^{−τλ}`: the real root reached by Newton from
/// `μ + b` when it exists, otherwise the conjugate pair `μ + W(τb e^{−τμ})/τ`.
pub fn scalar_roots(mu: f64, b: f64, tau: f64) -> Result<Vec<C64>> {
    if tau == 0.0 || b == 0.0 {
        return Ok(vec![C64::new(mu + b * (-tau * mu).exp(), 0.0)]);
    }
    // log |τ b e^{−τμ}|
    let xlog = (tau * b.abs()).ln() - tau * mu;
    if b > 0.0 || xlog <= -1.0 {
        return Ok(vec![real_root(mu, b, tau)?]);
    }
    // w e^w = x with x < −1/e: solve w + log w = log x on the principal branch
    let lx = C64::new(xlog, std::f64::consts::PI);
    let mut w = lx - lx.ln();
    for _ in 0..100 {
        let f = w + w.ln() - lx;
        let step = f / (1.0 + 1.0 / w);
        w -= step;
        if step.norm() <= 4.0 * f64::EPSILON * w.norm() {
            break;
        }
    }
    let l = C64::new(mu, 0.0) + w / tau;
    Ok(vec![l, l.conj()])
}

fn real_root(mu: f64, b: f64, tau: f64) -> Result<C64> {
    let mut l = mu + b;
    let mut step = f64::INFINITY;
    for _ in 0..200 {
        let e = (-tau * l).exp();
        let g = -l + mu + b * e;
        let dg = -1.0 - tau * b * e;
        step = g / dg;
        l -= step;
        if step.abs() <= 4.0 * f64::EPSILON * l.abs().max(1.0) {
            return Ok(C64::new(l, 0.0));
        }
    }
    // near a double root Newton is only linearly convergent
    if step.abs() <= 1e-10 * l.abs().max(1.0) {
        return Ok(C64::new(l, 0.0));
    }
    Err(NepError::NoConvergence(format!("scalar delay root for μ = {mu}")))
}
