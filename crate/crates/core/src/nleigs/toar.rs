//! Compact Krylov basis `V_k = (I_d ⊗ U) G_k` for the NLEIGS linearization.
//!
//! Every Krylov vector is stored as coefficients over the orthonormal
//! `n`-vectors `U`; entry `i·d + j` is the weight of `u_i` in block `j`, so
//! growing `U` only appends zeros.

use super::linearization::ShiftInvert;
use crate::error::{NepError, Result};
use crate::linalg::dense::{normalize, random_vec, CMat, CVec, C64, ZERO};
use crate::linalg::krylov::{Expansion, KrylovBasis};
use crate::linalg::orth::orthogonalize;
use ndarray::s;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Coefficient columns below this norm are dropped when `U` is compressed.
const COMPRESS_TOL: f64 = 1e-13;

pub struct ToarBasis<'s, 'r, 'a> {
    si: &'s ShiftInvert<'r, 'a>,
    pub u: Vec<CVec>,
    pub g: Vec<CVec>,
    n: usize,
    d: usize,
    rng: ChaCha8Rng,
}

impl<'s, 'r, 'a> ToarBasis<'s, 'r, 'a> {
    /// Basis holding the normalized `d`-block vector `start`.
    pub fn new(si: &'s ShiftInvert<'r, 'a>, start: &CVec, seed: u64) -> Result<Self> {
        let (n, d) = (si.ri.dim(), si.degree());
        if start.len() != n * d {
            return Err(NepError::Dimension(format!("start of length {} for size {}", start.len(), n * d)));
        }
        let mut b = ToarBasis { si, u: Vec::new(), g: Vec::new(), n, d, rng: ChaCha8Rng::seed_from_u64(seed) };
        let mut w = b.absorb(start);
        if normalize(&mut w) == 0.0 {
            return Err(NepError::InvalidInput("zero start vector".into()));
        }
        b.g.push(w);
        Ok(b)
    }

    pub fn rank(&self) -> usize {
        self.u.len()
    }

    fn push_u(&mut self, u: CVec) {
        self.u.push(u);
        for g in &mut self.g {
            let mut e = CVec::zeros(g.len() + self.d);
            e.slice_mut(s![..g.len()]).assign(g);
            *g = e;
        }
    }

    /// Orthogonalizes `z` against `U`, extending `U` when independent, and returns its coefficients.
    fn extend(&mut self, z: &CVec) -> CVec {
        let mut w = z.clone();
        let o = orthogonalize(&self.u, &mut w);
        let mut a = o.h.to_vec();
        if !o.dependent {
            w.mapv_inplace(|v| v / o.beta);
            self.push_u(w);
            a.push(C64::new(o.beta, 0.0));
        }
        CVec::from(a)
    }

    /// Coefficients of an arbitrary `d`-block vector, extending `U` as needed.
    fn absorb(&mut self, x: &CVec) -> CVec {
        let cols: Vec<CVec> = (0..self.d).map(|j| self.extend(&x.slice(s![j * self.n..(j + 1) * self.n]).to_owned())).collect();
        self.pack(&cols)
    }

    /// Flattens per-block coefficient columns (zero-padded to the current rank).
    fn pack(&self, cols: &[CVec]) -> CVec {
        let r = self.rank();
        let mut g = CVec::zeros(r * self.d);
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                g[i * self.d + j] = *v;
            }
        }
        g
    }

    fn column(&self, g: &CVec, j: usize) -> CVec {
        (0..g.len() / self.d).map(|i| g[i * self.d + j]).collect()
    }

    fn lift(&self, coef: &CVec) -> CVec {
        let mut v = CVec::zeros(self.n);
        for (c, u) in coef.iter().zip(&self.u) {
            if *c != ZERO {
                v.scaled_add(*c, u);
            }
        }
        v
    }

    /// Krylov vector `k` in full coordinates.
    pub fn vector(&self, k: usize) -> CVec {
        let mut y = CVec::zeros(self.g.len());
        y[k] = C64::new(1.0, 0.0);
        self.combine(&y)
    }

    fn push_g(&mut self, mut w: CVec) -> Expansion {
        let o = orthogonalize(&self.g, &mut w);
        if !o.dependent {
            w.mapv_inplace(|v| v / o.beta);
            self.g.push(w);
        }
        Expansion { h: o.h, beta: o.beta, dependent: o.dependent }
    }
}

impl KrylovBasis for ToarBasis<'_, '_, '_> {
    fn len(&self) -> usize {
        self.g.len()
    }

    fn space_dim(&self) -> usize {
        self.n * self.d
    }

    fn expand(&mut self) -> Result<Expansion> {
        let (d, si) = (self.d, self.si);
        let last = self.g.last().expect("nonempty basis").clone();
        let gc: Vec<CVec> = (0..d).map(|j| self.column(&last, j)).collect();
        let r = self.rank();
        // tail blocks of (𝒜 − σℬ)⁻¹ℬx in coefficient form
        let mut h = vec![CVec::zeros(r); d];
        for j in 1..d {
            let mut t = gc[j - 1].clone();
            t.scaled_add(si.eta[j], &gc[j]);
            t.scaled_add(-si.alpha[j], &h[j - 1]);
            h[j] = t.mapv(|v| v / si.gamma[j]);
        }
        let y: Vec<CVec> = h.iter().map(|c| self.lift(c)).collect();
        let z = si.head(&y, &self.lift(&gc[d - 1]))?;
        let zc = self.extend(&z);
        let r = self.rank();
        let cols: Vec<CVec> = (0..d)
            .map(|j| {
                let mut c = CVec::zeros(r);
                c.slice_mut(s![..h[j].len()]).assign(&h[j]);
                c.slice_mut(s![..zc.len()]).scaled_add(si.c[j], &zc);
                c
            })
            .collect();
        let w = self.pack(&cols);
        Ok(self.push_g(w))
    }

    fn append_random(&mut self) -> Result<bool> {
        if self.g.len() >= self.space_dim() {
            return Ok(false);
        }
        for _ in 0..3 {
            let x = random_vec(&mut self.rng, self.n * self.d);
            let w = self.absorb(&x);
            let before = self.g.len();
            let e = self.push_g(w);
            if !e.dependent && e.beta > 1e-10 {
                return Ok(true);
            }
            self.g.truncate(before);
        }
        Ok(false)
    }

    fn restart(&mut self, q: &CMat) -> Result<()> {
        let (m, p) = q.dim();
        let len = self.g[0].len();
        let mut out = Vec::with_capacity(p + 1);
        for j in 0..p {
            let mut v = CVec::zeros(len);
            for i in 0..m {
                v.scaled_add(q[[i, j]], &self.g[i]);
            }
            out.push(v);
        }
        if self.g.len() > m {
            out.push(self.g[m].clone());
        }
        self.g = out;
        // compress U to the span actually used by the coefficients
        let mut basis: Vec<CVec> = Vec::new();
        for g in &self.g {
            for j in 0..self.d {
                let mut c = self.column(g, j);
                let o = orthogonalize(&basis, &mut c);
                if o.beta > COMPRESS_TOL {
                    c.mapv_inplace(|v| v / o.beta);
                    basis.push(c);
                }
            }
        }
        if basis.len() < self.rank() {
            let u: Vec<CVec> = basis.iter().map(|c| self.lift(c)).collect();
            let g: Vec<CVec> = self
                .g
                .iter()
                .map(|g| {
                    let cols: Vec<CVec> = (0..self.d)
                        .map(|j| {
                            let col = self.column(g, j);
                            basis.iter().map(|b| crate::linalg::dense::vdot(&b.view(), &col.view())).collect()
                        })
                        .collect();
                    let mut out = CVec::zeros(basis.len() * self.d);
                    for (j, c) in cols.iter().enumerate() {
                        for (i, v) in c.iter().enumerate() {
                            out[i * self.d + j] = *v;
                        }
                    }
                    out
                })
                .collect();
            self.u = u;
            self.g = g;
        }
        Ok(())
    }

    fn combine(&self, y: &CVec) -> CVec {
        let mut gsum = CVec::zeros(self.g[0].len());
        for (c, g) in y.iter().zip(&self.g) {
            gsum.scaled_add(*c, g);
        }
        let mut v = CVec::zeros(self.n * self.d);
        for j in 0..self.d {
            v.slice_mut(s![j * self.n..(j + 1) * self.n]).assign(&self.lift(&self.column(&gsum, j)));
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::super::interpolant::RationalInterpolant;
    use super::super::leja::leja_bagby;
    use super::*;
    use crate::linalg::dense::{c, norm2, random_mat, re, vdot};
    use crate::linalg::krylov::FullBasis;
    use crate::linalg::solver::LinearSolver;
    use crate::linalg::sparse::{CsrMatrix, PatternHint};
    use crate::nep::NepOperator;
    use crate::scalarfn::ScalarFunction;

    fn op(seed: u64, n: usize) -> NepOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = || CsrMatrix::from_dense(&random_mat(&mut rng, n, n));
        NepOperator::split(
            vec![
                (m(), ScalarFunction::constant(re(1.0))),
                (m(), ScalarFunction::polynomial(vec![re(-1.0), re(0.0)])),
                (m(), ScalarFunction::exp().with_scale(re(-0.3), re(1.0))),
            ],
            PatternHint::Different,
        )
        .unwrap()
    }

    fn orth_defect(v: &[CVec]) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in v.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((vdot(&a.view(), &b.view()) - re(want)).norm());
            }
        }
        worst
    }

    #[test]
    fn matches_full_basis_and_stays_orthonormal() {
        let n = 8;
        let o = op(1, n);
        let grid: Vec<C64> = (0..300).map(|i| re(-2.0 + 4.0 * i as f64 / 299.0)).collect();
        let seq = leja_bagby(&grid, &[], 4, re(0.0)).unwrap();
        let ri = RationalInterpolant::build(&o, &seq, 1e-300, 4).unwrap();
        let si = ShiftInvert::new(&ri, c(0.1, 0.05), &LinearSolver::default()).unwrap();
        let d = ri.degree();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_vec(&mut rng, n);
        let start: CVec = (0..d).flat_map(|_| v.iter().copied()).collect();
        let mut toar = ToarBasis::new(&si, &start, 5).unwrap();
        let mut full = FullBasis::new(|x: &CVec| si.apply(x), &start, 5).unwrap();
        assert_eq!(toar.rank(), 1);
        for k in 0..10 {
            let a = toar.expand().unwrap();
            let b = full.expand().unwrap();
            assert!((a.beta - b.beta).abs() <= 1e-10 * b.beta, "step {k}");
            assert!(norm2(&(&a.h - &b.h).view()) <= 1e-10);
            assert!(norm2(&(toar.vector(k + 1) - &full.vecs[k + 1]).view()) <= 1e-10);
        }
        assert!(toar.rank() <= 10 + d);
        assert!(orth_defect(&toar.u) <= 1e-10);
        assert!(orth_defect(&toar.g) <= 1e-10);
        // restart onto a random 4-dimensional subspace, then compress
        let mut cols: Vec<CVec> = Vec::new();
        while cols.len() < 4 {
            let mut w = random_vec(&mut rng, 10);
            let o = orthogonalize(&cols, &mut w);
            cols.push(w.mapv(|x| x / o.beta));
        }
        let q = CMat::from_shape_fn((10, 4), |(i, j)| cols[j][i]);
        let before: Vec<CVec> = (0..4).map(|j| full.combine(&q.column(j).to_owned())).collect();
        toar.restart(&q).unwrap();
        assert!(toar.rank() <= 5 + d);
        for (j, want) in before.iter().enumerate() {
            assert!(norm2(&(toar.vector(j) - want).view()) <= 1e-10);
        }
        assert!(orth_defect(&toar.u) <= 1e-10);
    }
}
