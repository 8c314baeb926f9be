//! Dense matrix functions for the leaf kinds.

use super::Kind;
use crate::error::{NepError, Result};
use crate::linalg::dense::{adjoint, eye, norm_one, CMat, C64, ZERO};
use crate::linalg::lu::DenseLu;
use crate::linalg::schur::schur;

pub const DEFAULT_MATFUN_CAP: usize = 256;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub(super) fn leaf_matrix(kind: &Kind, h: &CMat) -> Result<CMat> {
    match kind {
        Kind::Rational { num, den } => rational(num, den, h),
        Kind::Exp => expm(h),
        Kind::Log => logm(h),
        Kind::Sqrt => sqrtm(h),
        Kind::InvSqrt => {
            let s = sqrtm(h)?;
            let lu = DenseLu::factor(&s.view()).map_err(|_| NepError::Pole("singular square root".into()))?;
            Ok(lu.inverse())
        }
        Kind::Phi(k) => phim(*k, h),
    }
}

fn horner_matrix(p: &[C64], h: &CMat) -> CMat {
    let n = h.nrows();
    let mut acc = CMat::zeros((n, n));
    for &c in p {
        acc = acc.dot(h);
        for i in 0..n {
            acc[[i, i]] += c;
        }
    }
    acc
}

/// `p(H) q(H)⁻¹`
pub fn rational(num: &[C64], den: &[C64], h: &CMat) -> Result<CMat> {
    let p = horner_matrix(num, h);
    let q = horner_matrix(den, h);
    let lu = DenseLu::factor(&q.view()).map_err(|_| NepError::Pole("denominator polynomial of H is singular".into()))?;
    Ok(lu.solve_mat(&p.view()))
}

/// Scaling and squaring with the degree-13 Padé approximant; scaled to unit 1-norm.
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if n == 0 {
        return Ok(a.clone());
    }
    let nrm = norm_one(&a.view());
    if !nrm.is_finite() {
        return Err(NepError::InvalidInput("non-finite matrix in exp".into()));
    }
    let s = if nrm > 1.0 { nrm.log2().ceil() as i32 } else { 0 };
    let a = a * C64::new(0.5f64.powi(s), 0.0);
    let ident = eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = PADE13;
    let r = |x: f64| C64::new(x, 0.0);
    let inner_u = a6.dot(&(&a6 * r(b[13]) + &a4 * r(b[11]) + &a2 * r(b[9])));
    let u = a.dot(&(inner_u + &a6 * r(b[7]) + &a4 * r(b[5]) + &a2 * r(b[3]) + &ident * r(b[1])));
    let inner_v = a6.dot(&(&a6 * r(b[12]) + &a4 * r(b[10]) + &a2 * r(b[8])));
    let v = inner_v + &a6 * r(b[6]) + &a4 * r(b[4]) + &a2 * r(b[2]) + &ident * r(b[0]);
    let p = &v + &u;
    let q = &v - &u;
    let lu = DenseLu::factor(&q.view())?;
    let mut e = lu.solve_mat(&p.view());
    for _ in 0..s {
        e = e.dot(&e);
    }
    Ok(e)
}

/// Principal square root of an upper triangular matrix.
fn sqrt_triangular(t: &CMat) -> Result<CMat> {
    let n = t.nrows();
    let mut r = CMat::zeros((n, n));
    for i in 0..n {
        r[[i, i]] = t[[i, i]].sqrt();
    }
    for j in 0..n {
        for i in (0..j).rev() {
            let mut s = t[[i, j]];
            for k in i + 1..j {
                s -= r[[i, k]] * r[[k, j]];
            }
            let d = r[[i, i]] + r[[j, j]];
            if d == ZERO {
                if s == ZERO {
                    r[[i, j]] = ZERO;
                    continue;
                }
                return Err(NepError::Domain("square root does not exist (singular Schur block)".into()));
            }
            r[[i, j]] = s / d;
        }
    }
    Ok(r)
}

/// Principal square root via the complex Schur form.
pub fn sqrtm(a: &CMat) -> Result<CMat> {
    let (t, z) = schur(&a.view())?;
    let r = sqrt_triangular(&t)?;
    Ok(z.dot(&r).dot(&adjoint(&z.view())))
}

/// Principal logarithm by inverse scaling and squaring on the Schur factor.
pub fn logm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let (mut t, z) = schur(&a.view())?;
    for i in 0..n {
        if t[[i, i]] == ZERO {
            return Err(NepError::Domain("log of a singular matrix".into()));
        }
    }
    let ident = eye(n);
    let mut k = 0;
    while norm_one(&(&t - &ident).view()) > 0.25 {
        t = sqrt_triangular(&t)?;
        k += 1;
        if k > 60 {
            return Err(NepError::NoConvergence("log: square roots did not approach identity".into()));
        }
    }
    // log M = 2 atanh((M - I)(M + I)^{-1})
    let lu = DenseLu::factor(&(&t + &ident).view())?;
    let y = lu.solve_mat(&(&t - &ident).view());
    let y2 = y.dot(&y);
    let mut term = y.clone();
    let mut sum = y.clone();
    for j in 1..60 {
        term = term.dot(&y2);
        let add = &term * C64::new(1.0 / (2 * j + 1) as f64, 0.0);
        let small = norm_one(&add.view()) <= f64::EPSILON * norm_one(&sum.view());
        sum = sum + add;
        if small {
            break;
        }
    }
    let l = sum * C64::new(2.0 * 2f64.powi(k), 0.0);
    Ok(z.dot(&l).dot(&adjoint(&z.view())))
}

/// `φ_k(H)` from the top-right block of the exponential of the augmented matrix.
pub fn phim(k: u32, h: &CMat) -> Result<CMat> {
    if k == 0 {
        return expm(h);
    }
    let n = h.nrows();
    let k = k as usize;
    let m = (k + 1) * n;
    let mut w = CMat::zeros((m, m));
    w.slice_mut(ndarray::s![0..n, 0..n]).assign(h);
    for b in 0..k {
        for i in 0..n {
            w[[b * n + i, (b + 1) * n + i]] = C64::new(1.0, 0.0);
        }
    }
    let e = expm(&w)?;
    Ok(e.slice(ndarray::s![0..n, k * n..(k + 1) * n]).to_owned())
}
