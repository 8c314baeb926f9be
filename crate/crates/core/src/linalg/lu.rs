//! Dense LU with partial pivoting.

use super::dense::{CMat, CVec, C64, ZERO};
use crate::error::{NepError, Result};
use ndarray::{ArrayView1, ArrayView2};

#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: CMat,
    piv: Vec<usize>,
}

impl DenseLu {
    /// Factor `P A = L U`. Fails only on an exactly zero pivot.
    pub fn factor(a: &ArrayView2<C64>) -> Result<Self> {
        let (n, m) = a.dim();
        if n != m {
            return Err(NepError::Dimension(format!("LU of a {n}x{m} matrix")));
        }
        let mut lu = a.to_owned();
        let mut piv = vec![0; n];
        for k in 0..n {
            let mut p = k;
            let mut best = lu[[k, k]].norm();
            for i in k + 1..n {
                let v = lu[[i, k]].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            if best == 0.0 || !best.is_finite() {
                return Err(NepError::Singular { index: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap([k, j], [p, j]);
                }
            }
            let d = lu[[k, k]];
            let (top, mut rest) = lu.view_mut().split_at(ndarray::Axis(0), k + 1);
            let prow = top.row(k);
            for mut row in rest.rows_mut() {
                let l = row[k] / d;
                row[k] = l;
                if l != ZERO {
                    for j in k + 1..n {
                        row[j] -= l * prow[j];
                    }
                }
            }
        }
        Ok(DenseLu { lu, piv })
    }

    pub fn dim(&self) -> usize {
        self.piv.len()
    }

    pub fn solve(&self, b: &ArrayView1<C64>) -> CVec {
        let n = self.dim();
        let mut x = b.to_owned();
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Solves `A^* x = b`.
    pub fn solve_adjoint(&self, b: &ArrayView1<C64>) -> CVec {
        let n = self.dim();
        let mut x = b.to_owned();
        // U^* z = b
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[[j, i]].conj() * x[j];
            }
            x[i] = s / self.lu[[i, i]].conj();
        }
        // L^* w = z
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[[j, i]].conj() * x[j];
            }
            x[i] = s;
        }
        for k in (0..n).rev() {
            x.swap(k, self.piv[k]);
        }
        x
    }

    pub fn solve_mat(&self, b: &ArrayView2<C64>) -> CMat {
        let mut out = CMat::zeros(b.dim());
        for (j, col) in b.columns().into_iter().enumerate() {
            out.column_mut(j).assign(&self.solve(&col));
        }
        out
    }

    pub fn inverse(&self) -> CMat {
        self.solve_mat(&super::dense::eye(self.dim()).view())
    }
}

pub fn solve(a: &ArrayView2<C64>, b: &ArrayView1<C64>) -> Result<CVec> {
    Ok(DenseLu::factor(a)?.solve(b))
}

pub fn inverse(a: &ArrayView2<C64>) -> Result<CMat> {
    Ok(DenseLu::factor(a)?.inverse())
}
