//! Problem representation: split form `T(λ) = Σ f_i(λ) A_i` or user callbacks.

mod region;
mod selector;
mod settings;
mod solution;

pub use region::Region;
pub use selector::ShiftInvertSelector;
pub use settings::{ConvergenceTest, ProblemType, Settings, Which};
pub use solution::{apply_resolvent, EigenPair, EigenSolution, SolveStats};

use crate::error::{NepError, Result};
use crate::linalg::dense::{norm2, CVec, C64, ZERO};
use crate::linalg::sparse::{CsrMatrix, PatternHint};
use crate::scalarfn::ScalarFunction;
use std::sync::Arc;

/// User-supplied evaluation of `T(λ)` and `T′(λ)`.
pub trait NepCallback: Send + Sync {
    fn dim(&self) -> usize;
    fn function(&self, lambda: C64) -> Result<CsrMatrix>;
    fn derivative(&self, lambda: C64) -> Result<CsrMatrix>;
}

#[derive(Clone)]
struct Split {
    mats: Vec<CsrMatrix>,
    funcs: Vec<ScalarFunction>,
    hint: PatternHint,
    union: CsrMatrix,
    // position of every entry of term i in the union pattern
    maps: Vec<Vec<usize>>,
    norms: Vec<f64>,
}

#[derive(Clone)]
enum Repr {
    Split(Split),
    Callback(Arc<dyn NepCallback>),
}

#[derive(Clone)]
pub struct NepOperator {
    n: usize,
    repr: Repr,
}

impl std::fmt::Debug for NepOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            Repr::Split(s) => write!(f, "NepOperator(split, n={}, terms={})", self.n, s.mats.len()),
            Repr::Callback(_) => write!(f, "NepOperator(callback, n={})", self.n),
        }
    }
}

impl NepOperator {
    pub fn split(terms: Vec<(CsrMatrix, ScalarFunction)>, hint: PatternHint) -> Result<Self> {
        if terms.is_empty() {
            return Err(NepError::InvalidInput("split form needs at least one term".into()));
        }
        let n = terms[0].0.nrows();
        for (i, (a, _)) in terms.iter().enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return Err(NepError::Dimension(format!(
                    "term {i} is {}x{}, expected {n}x{n}",
                    a.nrows(),
                    a.ncols()
                )));
            }
        }
        let (mats, funcs): (Vec<_>, Vec<_>) = terms.into_iter().unzip();
        let mut union = mats[0].zeros_like();
        for m in &mats[1..] {
            let h = if hint == PatternHint::Different { PatternHint::Different } else { PatternHint::Subset };
            union = union.axpy(ZERO, m, h).or_else(|_| union.axpy(ZERO, m, PatternHint::Different))?;
        }
        let maps = mats.iter().map(|m| union.locate(m).expect("union contains every term")).collect();
        let norms = mats.iter().map(|m| m.norm_inf()).collect();
        Ok(NepOperator { n, repr: Repr::Split(Split { mats, funcs, hint, union, maps, norms }) })
    }

    pub fn callback(cb: Arc<dyn NepCallback>) -> Self {
        NepOperator { n: cb.dim(), repr: Repr::Callback(cb) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_split(&self) -> bool {
        matches!(self.repr, Repr::Split(_))
    }

    pub fn num_terms(&self) -> usize {
        match &self.repr {
            Repr::Split(s) => s.mats.len(),
            Repr::Callback(_) => 0,
        }
    }

    pub fn matrices(&self) -> &[CsrMatrix] {
        match &self.repr {
            Repr::Split(s) => &s.mats,
            Repr::Callback(_) => &[],
        }
    }

    pub fn functions(&self) -> &[ScalarFunction] {
        match &self.repr {
            Repr::Split(s) => &s.funcs,
            Repr::Callback(_) => &[],
        }
    }

    /// Cached `‖A_i‖∞`.
    pub fn norms(&self) -> &[f64] {
        match &self.repr {
            Repr::Split(s) => &s.norms,
            Repr::Callback(_) => &[],
        }
    }

    pub fn pattern_hint(&self) -> PatternHint {
        match &self.repr {
            Repr::Split(s) => s.hint,
            Repr::Callback(_) => PatternHint::Different,
        }
    }

    pub fn coeffs(&self, lambda: C64) -> Result<Vec<C64>> {
        self.functions().iter().map(|f| f.eval(lambda)).collect()
    }

    pub fn deriv_coeffs(&self, lambda: C64) -> Result<Vec<C64>> {
        self.functions().iter().map(|f| f.eval_deriv(lambda)).collect()
    }

    /// `Σ c_i A_i` on the union pattern.
    pub fn combine(&self, c: &[C64]) -> Result<CsrMatrix> {
        match &self.repr {
            Repr::Split(s) => {
                let mut out = s.union.zeros_like();
                let data = out.data_mut();
                for ((m, map), &ci) in s.mats.iter().zip(&s.maps).zip(c) {
                    if ci == ZERO {
                        continue;
                    }
                    for (&p, &v) in map.iter().zip(m.data()) {
                        data[p] += ci * v;
                    }
                }
                Ok(out)
            }
            Repr::Callback(_) => Err(NepError::Unsupported("linear combination of callback operator".into())),
        }
    }

    /// `Σ c_i A_i v`
    pub fn apply_combination(&self, c: &[C64], v: &CVec) -> CVec {
        let mut y = CVec::zeros(self.n);
        for (m, &ci) in self.matrices().iter().zip(c) {
            if ci != ZERO {
                m.apply_add(ci, &v.view(), &mut y);
            }
        }
        y
    }

    /// `Σ conj(c_i) A_i^* v`
    pub fn apply_combination_adjoint(&self, c: &[C64], v: &CVec) -> CVec {
        let mut y = CVec::zeros(self.n);
        for (m, &ci) in self.matrices().iter().zip(c) {
            if ci != ZERO {
                y.scaled_add(ci.conj(), &m.apply_adjoint(&v.view()));
            }
        }
        y
    }

    pub fn assemble(&self, lambda: C64) -> Result<CsrMatrix> {
        match &self.repr {
            Repr::Split(_) => self.combine(&self.coeffs(lambda)?),
            Repr::Callback(cb) => cb.function(lambda),
        }
    }

    pub fn assemble_deriv(&self, lambda: C64) -> Result<CsrMatrix> {
        match &self.repr {
            Repr::Split(_) => self.combine(&self.deriv_coeffs(lambda)?),
            Repr::Callback(cb) => cb.derivative(lambda),
        }
    }

    /// `T(λ) v` without assembling in split form.
    pub fn apply(&self, lambda: C64, v: &CVec) -> Result<CVec> {
        match &self.repr {
            Repr::Split(_) => Ok(self.apply_combination(&self.coeffs(lambda)?, v)),
            Repr::Callback(cb) => Ok(cb.function(lambda)?.apply(&v.view())),
        }
    }

    pub fn apply_deriv(&self, lambda: C64, v: &CVec) -> Result<CVec> {
        match &self.repr {
            Repr::Split(_) => Ok(self.apply_combination(&self.deriv_coeffs(lambda)?, v)),
            Repr::Callback(cb) => Ok(cb.derivative(lambda)?.apply(&v.view())),
        }
    }

    /// `T(λ)^* v`
    pub fn apply_adjoint(&self, lambda: C64, v: &CVec) -> Result<CVec> {
        match &self.repr {
            Repr::Split(_) => Ok(self.apply_combination_adjoint(&self.coeffs(lambda)?, v)),
            Repr::Callback(cb) => Ok(cb.function(lambda)?.apply_adjoint(&v.view())),
        }
    }

    /// Denominator scale: `Σ |f_i(λ)| ‖A_i‖∞` or `‖T(λ)‖∞`.
    pub fn scale(&self, lambda: C64) -> Result<f64> {
        match &self.repr {
            Repr::Split(s) => {
                let c = self.coeffs(lambda)?;
                Ok(c.iter().zip(&s.norms).map(|(ci, ni)| ci.norm() * ni).sum())
            }
            Repr::Callback(cb) => Ok(cb.function(lambda)?.norm_inf()),
        }
    }

    /// Scaled residual `η = ‖T(λ)x‖ / (scale(λ) ‖x‖)`.
    pub fn backward_error(&self, lambda: C64, x: &CVec) -> Result<f64> {
        let xn = norm2(&x.view());
        if xn == 0.0 {
            return Err(NepError::InvalidInput("backward error of a zero vector".into()));
        }
        let r = norm2(&self.apply(lambda, x)?.view());
        let s = self.scale(lambda)?;
        if s == 0.0 {
            return Err(NepError::InvalidInput(format!("degenerate scale at λ = {lambda}")));
        }
        Ok(r / (s * xn))
    }

    /// Left analogue `‖T(λ)^* y‖ / (scale(λ) ‖y‖)`.
    pub fn left_backward_error(&self, lambda: C64, y: &CVec) -> Result<f64> {
        let yn = norm2(&y.view());
        if yn == 0.0 {
            return Err(NepError::InvalidInput("backward error of a zero vector".into()));
        }
        let r = norm2(&self.apply_adjoint(lambda, y)?.view());
        Ok(r / (self.scale(lambda)? * yn))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{c, re, ONE};

    fn two_by_two() -> NepOperator {
        // T(λ) = diag(1, 3) − λ I
        let a = CsrMatrix::diagonal(&[re(1.0), re(3.0)]);
        let i = CsrMatrix::identity(2);
        NepOperator::split(
            vec![(a, ScalarFunction::constant(ONE)), (i, ScalarFunction::polynomial(vec![re(-1.0), ZERO]))],
            PatternHint::Different,
        )
        .unwrap()
    }

    #[test]
    fn single_constant_term() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, re(2.0)), (1, 0, re(-1.0))]).unwrap();
        let op = NepOperator::split(vec![(a.clone(), ScalarFunction::constant(ONE))], PatternHint::Same).unwrap();
        assert_eq!(op.assemble(c(4.0, 1.0)).unwrap().to_dense(), a.to_dense());
    }

    #[test]
    fn exact_pair_has_tiny_eta() {
        let op = two_by_two();
        let x = CVec::from(vec![ONE, ZERO]);
        assert!(op.backward_error(re(1.0), &x).unwrap() <= 1e-15);
    }

    #[test]
    fn apply_zero_is_zero() {
        let op = two_by_two();
        let v = CVec::zeros(2);
        assert!(op.apply(c(0.3, 0.1), &v).unwrap().iter().all(|z| *z == ZERO));
    }

    #[test]
    fn identity_times_lambda() {
        let op = NepOperator::split(
            vec![(CsrMatrix::identity(3), ScalarFunction::polynomial(vec![ONE, ZERO]))],
            PatternHint::Same,
        )
        .unwrap();
        let v = CVec::from(vec![re(1.0), c(0.0, 2.0), re(-1.0)]);
        let l = c(1.5, -0.5);
        assert_eq!(op.apply(l, &v).unwrap(), &v * l);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let r = NepOperator::split(
            vec![
                (CsrMatrix::identity(2), ScalarFunction::constant(ONE)),
                (CsrMatrix::identity(3), ScalarFunction::constant(ONE)),
            ],
            PatternHint::Different,
        );
        assert!(matches!(r, Err(NepError::Dimension(_))));
    }
}
