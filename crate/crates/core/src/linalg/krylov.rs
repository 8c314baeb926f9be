//! Krylov–Schur iteration over an abstract basis.
//!
//! The engine keeps the relation `S V_m = V_{m+1} Hbar` where the leading
//! `m x m` block of `Hbar` is upper triangular after each restart and
//! Hessenberg in the newly added columns.

use super::dense::{CMat, CVec, C64, ZERO};
use super::orth::orthogonalize;
use super::schur::{reorder, schur, triangular_eigvecs};
use crate::error::{NepError, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Expansion {
    pub h: CVec,
    pub beta: f64,
    pub dependent: bool,
}

pub trait KrylovBasis {
    /// Number of stored vectors.
    fn len(&self) -> usize;
    /// Dimension of the space the vectors live in.
    fn space_dim(&self) -> usize;
    /// Applies the operator to the last vector, orthogonalizes against the
    /// basis and appends the normalized result unless it is dependent.
    fn expand(&mut self) -> Result<Expansion>;
    /// Appends a random unit vector orthogonal to the basis; `false` when the space is full.
    fn append_random(&mut self) -> Result<bool>;
    /// Replaces the first `q.nrows()` vectors by `V Q` and keeps vector `q.nrows()` as the last one.
    fn restart(&mut self, q: &CMat) -> Result<()>;
    /// Returns `V y` in full coordinates.
    fn combine(&self, y: &CVec) -> CVec;
}

/// Ordering and convergence decisions delegated to the caller.
pub trait RitzSelector {
    /// `(admissible, distance)`: admissible values first, then smaller distance.
    fn key(&self, theta: C64) -> (bool, f64);
    /// Decides whether a Ritz pair has converged.
    fn accept(&mut self, theta: C64, x: &CVec, resid_est: f64) -> Result<bool>;
}

#[derive(Debug, Clone)]
pub struct KsSettings {
    pub nev: usize,
    pub ncv: usize,
    pub max_restarts: usize,
}

#[derive(Debug, Clone)]
pub struct KsOutcome {
    /// Accepted pairs in selector order.
    pub converged: Vec<(C64, CVec)>,
    /// Sorted Ritz values at the end of every cycle.
    pub history: Vec<Vec<C64>>,
    /// Residual estimates `‖S y − θ y‖` matching `history`.
    pub estimates: Vec<Vec<f64>>,
    pub restarts: usize,
    /// The whole space was spanned before convergence.
    pub exhausted: bool,
    /// Remaining unconverged leading Ritz pairs (value, vector, residual estimate).
    pub candidates: Vec<(C64, CVec, f64)>,
}

fn sort_order(thetas: &[C64], sel: &dyn RitzSelector) -> Vec<usize> {
    let keys: Vec<(bool, f64)> = thetas.iter().map(|&t| sel.key(t)).collect();
    let mut idx: Vec<usize> = (0..thetas.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ka, kb) = (keys[a], keys[b]);
        kb.0.cmp(&ka.0).then(ka.1.partial_cmp(&kb.1).unwrap_or(std::cmp::Ordering::Equal))
    });
    // near ties (conjugate pairs around a real target) ordered by imaginary part
    let mut changed = true;
    while changed {
        changed = false;
        for i in 1..idx.len() {
            let (a, b) = (idx[i - 1], idx[i]);
            if keys[a].0 == keys[b].0 && near(keys[a].1, keys[b].1) && thetas[b].im > thetas[a].im + 1e-300 {
                idx.swap(i - 1, i);
                changed = true;
            }
        }
    }
    idx
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
}

/// Runs Krylov–Schur. The basis must hold exactly one unit start vector.
pub fn krylov_schur<B: KrylovBasis + ?Sized>(
    basis: &mut B,
    sel: &mut dyn RitzSelector,
    cfg: &KsSettings,
) -> Result<KsOutcome> {
    if basis.len() != 1 {
        return Err(NepError::InvalidInput("Krylov–Schur needs a single start vector".into()));
    }
    let ncv = cfg.ncv.min(basis.space_dim()).max(1);
    let mut hbar = CMat::zeros((ncv + 1, ncv));
    let mut k = 0usize;
    let mut history = Vec::new();
    let mut estimates = Vec::new();
    let mut restarts = 0;
    loop {
        let mut exhausted = false;
        while k < ncv {
            let e = basis.expand()?;
            for (i, h) in e.h.iter().enumerate() {
                hbar[[i, k]] = *h;
            }
            if e.dependent {
                hbar[[k + 1, k]] = ZERO;
                k += 1;
                if !basis.append_random()? {
                    exhausted = true;
                    break;
                }
            } else {
                hbar[[k + 1, k]] = C64::new(e.beta, 0.0);
                k += 1;
            }
        }
        let m = k;
        if m == basis.space_dim() {
            // any further vector is rounding noise
            exhausted = true;
        }
        let hm = hbar.slice(ndarray::s![0..m, 0..m]).to_owned();
        let (mut t, mut z) = schur(&hm.view())?;
        let thetas: Vec<C64> = (0..m).map(|i| t[[i, i]]).collect();
        let order = sort_order(&thetas, sel);
        reorder(&mut t, &mut z, &order);
        let brow: CVec = if exhausted { CVec::zeros(m) } else { hbar.row(m).slice(ndarray::s![0..m]).to_owned() };
        let bz = z.t().dot(&brow);
        let svec = triangular_eigvecs(&t.view());
        let sorted: Vec<C64> = (0..m).map(|i| t[[i, i]]).collect();
        history.push(sorted.clone());
        let ests: Vec<f64> = (0..m).map(|i| (0..=i).map(|r| bz[r] * svec[[r, i]]).sum::<C64>().norm()).collect();

        let mut converged = Vec::new();
        let mut candidates = Vec::new();
        for i in 0..m {
            if converged.len() >= cfg.nev {
                break;
            }
            let theta = sorted[i];
            let s = svec.column(i).to_owned();
            let est = ests[i];
            if !sel.key(theta).0 {
                break;
            }
            let y = z.dot(&s);
            let x = basis.combine(&y);
            if sel.accept(theta, &x, est)? {
                converged.push((theta, x));
            } else {
                candidates.push((theta, x, est));
                break;
            }
        }
        estimates.push(ests);
        let nconv = converged.len();
        if nconv >= cfg.nev || exhausted || restarts >= cfg.max_restarts || m < 2 {
            return Ok(KsOutcome { converged, history, estimates, restarts, exhausted, candidates });
        }
        // restart
        let mut p = ((ncv + 1) / 2).max(nconv + 1).min(m - 1).max(1);
        while p < m - 1 && near(sel.key(sorted[p - 1]).1, sel.key(sorted[p]).1) {
            p += 1;
        }
        let q = z.slice(ndarray::s![.., 0..p]).to_owned();
        let mut newh = CMat::zeros((ncv + 1, ncv));
        for i in 0..p {
            for j in i..p {
                newh[[i, j]] = t[[i, j]];
            }
            newh[[p, i]] = bz[i];
        }
        hbar = newh;
        basis.restart(&q)?;
        k = p;
        restarts += 1;
    }
}

/// Krylov basis stored as explicit vectors.
pub struct FullBasis<F: FnMut(&CVec) -> Result<CVec>> {
    pub vecs: Vec<CVec>,
    op: F,
    n: usize,
    rng: ChaCha8Rng,
}

impl<F: FnMut(&CVec) -> Result<CVec>> FullBasis<F> {
    pub fn new(op: F, start: &CVec, seed: u64) -> Result<Self> {
        let mut v = start.clone();
        let nrm = super::dense::normalize(&mut v);
        if nrm == 0.0 {
            return Err(NepError::InvalidInput("zero start vector".into()));
        }
        Ok(FullBasis { n: v.len(), vecs: vec![v], op, rng: ChaCha8Rng::seed_from_u64(seed) })
    }
}

impl<F: FnMut(&CVec) -> Result<CVec>> KrylovBasis for FullBasis<F> {
    fn len(&self) -> usize {
        self.vecs.len()
    }

    fn space_dim(&self) -> usize {
        self.n
    }

    fn expand(&mut self) -> Result<Expansion> {
        let mut w = (self.op)(self.vecs.last().expect("nonempty basis"))?;
        let o = orthogonalize(&self.vecs, &mut w);
        if !o.dependent {
            w.mapv_inplace(|v| v / o.beta);
            self.vecs.push(w);
        }
        Ok(Expansion { h: o.h, beta: o.beta, dependent: o.dependent })
    }

    fn append_random(&mut self) -> Result<bool> {
        if self.vecs.len() >= self.n {
            return Ok(false);
        }
        for _ in 0..3 {
            let mut w = super::dense::random_vec(&mut self.rng, self.n);
            let o = orthogonalize(&self.vecs, &mut w);
            if !o.dependent && o.beta > 1e-10 {
                w.mapv_inplace(|v| v / o.beta);
                self.vecs.push(w);
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn restart(&mut self, q: &CMat) -> Result<()> {
        let (m, p) = q.dim();
        let mut out = Vec::with_capacity(p + 1);
        for j in 0..p {
            let mut v = CVec::zeros(self.n);
            for i in 0..m {
                v.scaled_add(q[[i, j]], &self.vecs[i]);
            }
            out.push(v);
        }
        if self.vecs.len() > m {
            out.push(self.vecs[m].clone());
        }
        self.vecs = out;
        Ok(())
    }

    fn combine(&self, y: &CVec) -> CVec {
        let mut v = CVec::zeros(self.n);
        for (i, c) in y.iter().enumerate() {
            v.scaled_add(*c, &self.vecs[i]);
        }
        v
    }
}
