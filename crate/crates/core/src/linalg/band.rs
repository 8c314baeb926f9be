//! Banded LU with partial pivoting (LAPACK gbtf2 layout).
//!
//! Entry `(i, j)` of the factor lives at `ab[(kv + i - j) + j * ldab]` with
//! `kv = kl + ku`, leaving `kl` extra superdiagonals for pivoting fill.

use super::dense::{CVec, C64, ZERO};
use super::sparse::CsrMatrix;
use crate::error::{NepError, Result};
use ndarray::ArrayView1;

#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<C64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(NepError::Dimension("banded LU needs a square matrix".into()));
        }
        let (kl, ku) = a.bandwidth();
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![ZERO; ldab * n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                ab[(kv + i - j) + j * ldab] += v;
            }
        }
        let mut piv = vec![0; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = ab[kv + j * ldab].norm();
            for t in 1..=km {
                let v = ab[kv + t + j * ldab].norm();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            piv[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(NepError::Singular { index: j });
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for col in j..=ju {
                    ab.swap(kv + j - col + col * ldab, kv + j + jp - col + col * ldab);
                }
            }
            if km > 0 {
                let inv = 1.0 / ab[kv + j * ldab];
                for t in 1..=km {
                    ab[kv + t + j * ldab] *= inv;
                }
                for col in j + 1..=ju {
                    let u = ab[kv + j - col + col * ldab];
                    if u != ZERO {
                        for t in 1..=km {
                            let l = ab[kv + t + j * ldab];
                            ab[kv + j + t - col + col * ldab] -= l * u;
                        }
                    }
                }
            }
        }
        Ok(BandLu { n, kl, ku, ab, piv })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn ldab(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    pub fn solve(&self, b: &ArrayView1<C64>) -> CVec {
        let (n, kl, kv, ldab) = (self.n, self.kl, self.kl + self.ku, self.ldab());
        let mut x = b.to_owned();
        for j in 0..n {
            x.swap(j, self.piv[j]);
            let km = kl.min(n - 1 - j);
            let xj = x[j];
            if xj != ZERO {
                for t in 1..=km {
                    x[j + t] -= self.ab[kv + t + j * ldab] * xj;
                }
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.ab[kv + j * ldab];
            let xj = x[j];
            if xj != ZERO {
                let lo = j.saturating_sub(kv);
                for i in lo..j {
                    x[i] -= self.ab[kv + i - j + j * ldab] * xj;
                }
            }
        }
        x
    }

    /// Solves `A^* x = b`.
    pub fn solve_adjoint(&self, b: &ArrayView1<C64>) -> CVec {
        let (n, kl, kv, ldab) = (self.n, self.kl, self.kl + self.ku, self.ldab());
        let mut x = b.to_owned();
        for j in 0..n {
            let lo = j.saturating_sub(kv);
            let mut s = x[j];
            for i in lo..j {
                s -= self.ab[kv + i - j + j * ldab].conj() * x[i];
            }
            x[j] = s / self.ab[kv + j * ldab].conj();
        }
        for j in (0..n).rev() {
            let km = kl.min(n - 1 - j);
            let mut s = x[j];
            for t in 1..=km {
                s -= self.ab[kv + t + j * ldab].conj() * x[j + t];
            }
            x[j] = s;
            x.swap(j, self.piv[j]);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{adjoint, c, norm2, random_vec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(rng: &mut ChaCha8Rng, n: usize, kl: usize, ku: usize) -> CsrMatrix {
        let mut trip = Vec::new();
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                let d = if i == j { 2.0 } else { 0.0 };
                trip.push((i, j, c(d + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            }
        }
        CsrMatrix::from_triplets(n, n, &trip).unwrap()
    }

    #[test]
    fn matches_residual_for_random_bands() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(kl, ku) in &[(1, 1), (0, 2), (3, 1), (2, 0), (4, 4)] {
            let a = random_band(&mut rng, 40, kl, ku);
            let lu = BandLu::factor(&a).unwrap();
            let b = random_vec(&mut rng, 40);
            let x = lu.solve(&b.view());
            let r = a.apply(&x.view()) - &b;
            assert!(norm2(&r.view()) <= 1e-11 * norm2(&b.view()), "kl={kl} ku={ku}");
            let y = lu.solve_adjoint(&b.view());
            let ah = adjoint(&a.to_dense().view());
            let r = ah.dot(&y) - &b;
            assert!(norm2(&r.view()) <= 1e-11 * norm2(&b.view()), "adjoint kl={kl} ku={ku}");
        }
    }

    #[test]
    fn pivoting_needed() {
        // zero leading diagonal forces a row swap
        let trip = vec![
            (0, 1, c(1.0, 0.0)),
            (1, 0, c(1.0, 0.0)),
            (1, 1, c(1.0, 0.0)),
            (1, 2, c(1.0, 0.0)),
            (2, 1, c(2.0, 0.0)),
            (2, 2, c(3.0, 0.0)),
        ];
        let a = CsrMatrix::from_triplets(3, 3, &trip).unwrap();
        let lu = BandLu::factor(&a).unwrap();
        let b = ndarray::array![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let x = lu.solve(&b.view());
        let r = a.apply(&x.view()) - &b;
        assert!(norm2(&r.view()) < 1e-14);
    }
}
