//! Compressed sparse row storage with complex entries.

use super::dense::{CMat, CVec, C64, ZERO};
use crate::error::{NepError, Result};
use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

/// How the pattern of `X` relates to `Y` in `Y + αX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PatternHint {
    Same,
    Subset,
    #[default]
    Different,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<C64>,
    symmetric_pattern: bool,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, trip: &[(usize, usize, C64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); nrows];
        for &(i, j, v) in trip {
            if i >= nrows || j >= ncols {
                return Err(NepError::Dimension(format!(
                    "entry ({i},{j}) outside {nrows}x{ncols}"
                )));
            }
            rows[i].push((j, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::with_capacity(trip.len());
        let mut data = Vec::with_capacity(trip.len());
        indptr.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (j, v) in r {
                if last == Some(j) {
                    *data.last_mut().unwrap() += v;
                } else {
                    indices.push(j);
                    data.push(v);
                    last = Some(j);
                }
            }
            indptr.push(indices.len());
        }
        let mut m = CsrMatrix { nrows, ncols, indptr, indices, data, symmetric_pattern: false };
        m.symmetric_pattern = m.detect_symmetric_pattern();
        Ok(m)
    }

    pub fn from_dense(a: &CMat) -> Self {
        let (r, cc) = a.dim();
        let mut trip = Vec::new();
        for i in 0..r {
            for j in 0..cc {
                if a[[i, j]] != ZERO {
                    trip.push((i, j, a[[i, j]]));
                }
            }
        }
        Self::from_triplets(r, cc, &trip).expect("indices in range")
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let trip: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(d.len(), d.len(), &trip).expect("indices in range")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_pattern_symmetric(&self) -> bool {
        self.symmetric_pattern
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b].iter().copied().zip(self.data[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[a..b].binary_search(&j) {
            Ok(p) => self.data[a + p],
            Err(_) => ZERO,
        }
    }

    fn detect_symmetric_pattern(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        for i in 0..self.nrows {
            for &j in &self.indices[self.indptr[i]..self.indptr[i + 1]] {
                let (a, b) = (self.indptr[j], self.indptr[j + 1]);
                if self.indices[a..b].binary_search(&i).is_err() {
                    return false;
                }
            }
        }
        true
    }

    pub fn apply(&self, x: &ArrayView1<C64>) -> CVec {
        let mut y = CVec::zeros(self.nrows);
        for i in 0..self.nrows {
            let mut s = ZERO;
            for p in self.indptr[i]..self.indptr[i + 1] {
                s += self.data[p] * x[self.indices[p]];
            }
            y[i] = s;
        }
        y
    }

    /// `y += alpha * A x`
    pub fn apply_add(&self, alpha: C64, x: &ArrayView1<C64>, y: &mut CVec) {
        for i in 0..self.nrows {
            let mut s = ZERO;
            for p in self.indptr[i]..self.indptr[i + 1] {
                s += self.data[p] * x[self.indices[p]];
            }
            y[i] += alpha * s;
        }
    }

    /// `A^* x`
    pub fn apply_adjoint(&self, x: &ArrayView1<C64>) -> CVec {
        let mut y = CVec::zeros(self.ncols);
        for i in 0..self.nrows {
            let xi = x[i];
            for p in self.indptr[i]..self.indptr[i + 1] {
                y[self.indices[p]] += self.data[p].conj() * xi;
            }
        }
        y
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros((self.nrows, self.ncols));
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                m[[i, j]] += v;
            }
        }
        m
    }

    pub fn scale(&mut self, alpha: C64) {
        for v in &mut self.data {
            *v *= alpha;
        }
    }

    pub fn diag(&self) -> CVec {
        CVec::from_shape_fn(self.nrows.min(self.ncols), |i| self.get(i, i))
    }

    /// Max row sum of moduli.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Lower and upper bandwidths of the stored pattern.
    pub fn bandwidth(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..self.nrows {
            for &j in &self.indices[self.indptr[i]..self.indptr[i + 1]] {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }

    /// Returns `Y + αX` where `self` is `Y`.
    pub fn axpy(&self, alpha: C64, x: &CsrMatrix, hint: PatternHint) -> Result<CsrMatrix> {
        if self.nrows != x.nrows || self.ncols != x.ncols {
            return Err(NepError::Dimension(format!(
                "axpy of {}x{} into {}x{}",
                x.nrows, x.ncols, self.nrows, self.ncols
            )));
        }
        match hint {
            PatternHint::Same => {
                if self.indptr != x.indptr || self.indices != x.indices {
                    return Err(NepError::InvalidInput("pattern hint 'same' but patterns differ".into()));
                }
                let mut out = self.clone();
                for (o, v) in out.data.iter_mut().zip(&x.data) {
                    *o += alpha * v;
                }
                Ok(out)
            }
            PatternHint::Subset => {
                let mut out = self.clone();
                for i in 0..self.nrows {
                    let (a, b) = (self.indptr[i], self.indptr[i + 1]);
                    for (j, v) in x.row(i) {
                        match self.indices[a..b].binary_search(&j) {
                            Ok(p) => out.data[a + p] += alpha * v,
                            Err(_) => {
                                return Err(NepError::InvalidInput(
                                    "pattern hint 'subset' but pattern is not contained".into(),
                                ))
                            }
                        }
                    }
                }
                Ok(out)
            }
            PatternHint::Different => {
                let mut indptr = vec![0];
                let mut indices = Vec::new();
                let mut data = Vec::new();
                for i in 0..self.nrows {
                    let mut ya = self.row(i).peekable();
                    let mut xa = x.row(i).peekable();
                    loop {
                        match (ya.peek().copied(), xa.peek().copied()) {
                            (Some((jy, vy)), Some((jx, vx))) => {
                                if jy == jx {
                                    indices.push(jy);
                                    data.push(vy + alpha * vx);
                                    ya.next();
                                    xa.next();
                                } else if jy < jx {
                                    indices.push(jy);
                                    data.push(vy);
                                    ya.next();
                                } else {
                                    indices.push(jx);
                                    data.push(alpha * vx);
                                    xa.next();
                                }
                            }
                            (Some((jy, vy)), None) => {
                                indices.push(jy);
                                data.push(vy);
                                ya.next();
                            }
                            (None, Some((jx, vx))) => {
                                indices.push(jx);
                                data.push(alpha * vx);
                                xa.next();
                            }
                            (None, None) => break,
                        }
                    }
                    indptr.push(indices.len());
                }
                let mut m = CsrMatrix {
                    nrows: self.nrows,
                    ncols: self.ncols,
                    indptr,
                    indices,
                    data,
                    symmetric_pattern: false,
                };
                m.symmetric_pattern = m.detect_symmetric_pattern();
                Ok(m)
            }
        }
    }

    /// Same pattern, zero values.
    pub fn zeros_like(&self) -> CsrMatrix {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v = ZERO);
        m
    }

    /// Positions of `other`'s entries inside `self`'s pattern, if contained.
    pub fn locate(&self, other: &CsrMatrix) -> Option<Vec<usize>> {
        let mut pos = Vec::with_capacity(other.nnz());
        for i in 0..other.nrows {
            let (a, b) = (self.indptr[i], self.indptr[i + 1]);
            for &j in &other.indices[other.indptr[i]..other.indptr[i + 1]] {
                pos.push(a + self.indices[a..b].binary_search(&j).ok()?);
            }
        }
        Some(pos)
    }
}
