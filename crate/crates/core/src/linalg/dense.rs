//! Small dense helpers on `ndarray` complex arrays.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn eye(n: usize) -> CMat {
    let mut m = CMat::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = ONE;
    }
    m
}

pub fn diag(d: &[C64]) -> CMat {
    let mut m = CMat::zeros((d.len(), d.len()));
    for (i, &v) in d.iter().enumerate() {
        m[[i, i]] = v;
    }
    m
}

/// Conjugate transpose.
pub fn adjoint(a: &ArrayView2<C64>) -> CMat {
    let (r, cc) = a.dim();
    let mut out = CMat::zeros((cc, r));
    for i in 0..r {
        for j in 0..cc {
            out[[j, i]] = a[[i, j]].conj();
        }
    }
    out
}

/// Inner product `x^* y`.
pub fn vdot(x: &ArrayView1<C64>, y: &ArrayView1<C64>) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(x: &ArrayView1<C64>) -> f64 {
    // scaled to avoid overflow on large entries
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.re.abs()).max(v.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = x.iter().map(|v| (v / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

pub fn norm_inf_vec(x: &ArrayView1<C64>) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Max row sum.
pub fn norm_inf(a: &ArrayView2<C64>) -> f64 {
    a.rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Max column sum.
pub fn norm_one(a: &ArrayView2<C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn norm_fro(a: &ArrayView2<C64>) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn matmul(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> CMat {
    a.dot(b)
}

pub fn matvec(a: &ArrayView2<C64>, x: &ArrayView1<C64>) -> CVec {
    a.dot(x)
}

/// `a^* x` without forming the adjoint.
pub fn matvec_adjoint(a: &ArrayView2<C64>, x: &ArrayView1<C64>) -> CVec {
    let (r, cc) = a.dim();
    let mut out = CVec::zeros(cc);
    for i in 0..r {
        let xi = x[i];
        for j in 0..cc {
            out[j] += a[[i, j]].conj() * xi;
        }
    }
    out
}

pub fn random_vec<R: Rng>(rng: &mut R, n: usize) -> CVec {
    CVec::from_shape_fn(n, |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_mat<R: Rng>(rng: &mut R, r: usize, cc: usize) -> CMat {
    CMat::from_shape_fn((r, cc), |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Random unitary from the QR factor of a random square matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let mut q = random_mat(rng, n, n);
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let h: C64 = (0..n).map(|i| q[[i, k]].conj() * q[[i, j]]).sum();
                for i in 0..n {
                    let t = q[[i, k]];
                    q[[i, j]] -= h * t;
                }
            }
        }
        let nrm = norm2(&q.column(j));
        q.column_mut(j).mapv_inplace(|v| v / nrm);
    }
    q
}

pub fn normalize(x: &mut CVec) -> f64 {
    let n = norm2(&x.view());
    if n > 0.0 {
        x.mapv_inplace(|v| v / n);
    }
    n
}

/// Back substitution for upper triangular `R x = b`, in place.
pub fn solve_upper(r: &ArrayView2<C64>, b: &mut CVec) {
    let n = b.len();
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= r[[i, j]] * b[j];
        }
        b[i] = s / r[[i, i]];
    }
}

/// Numerical rank by Gram–Schmidt with column pivoting, relative to the largest column norm.
pub fn numerical_rank(a: &ArrayView2<C64>, rel_tol: f64) -> usize {
    let (m, n) = a.dim();
    let mut cols: Vec<CVec> = (0..n).map(|j| a.column(j).to_owned()).collect();
    let mut basis: Vec<CVec> = Vec::new();
    let first = cols.iter().map(|v| norm2(&v.view())).fold(0.0, f64::max);
    if first == 0.0 {
        return 0;
    }
    while !cols.is_empty() && basis.len() < m {
        let (jmax, nmax) = cols
            .iter()
            .enumerate()
            .map(|(j, v)| (j, norm2(&v.view())))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if nmax <= rel_tol * first {
            break;
        }
        let mut q = cols.swap_remove(jmax);
        for b in &basis {
            let h = vdot(&b.view(), &q.view());
            q.scaled_add(-h, b);
        }
        normalize(&mut q);
        for v in cols.iter_mut() {
            for _ in 0..2 {
                let h = vdot(&q.view(), &v.view());
                v.scaled_add(-h, &q);
            }
        }
        basis.push(q);
    }
    basis.len()
}
