//! Scalar analytic functions `g(x) = β f(αx)` with derivatives and matrix evaluation.

mod descriptor;
pub mod matfun;

use crate::error::{NepError, Result};
use crate::linalg::dense::{CMat, C64, ONE, ZERO};
use std::sync::Arc;

pub use matfun::DEFAULT_MATFUN_CAP;

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// Quotient of polynomials, coefficients from highest to lowest degree.
    Rational { num: Vec<C64>, den: Vec<C64> },
    Exp,
    Log,
    Sqrt,
    InvSqrt,
    Phi(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Mul,
    Div,
    /// `left(right(x))`
    Compose,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(Kind),
    Combine(CombineOp, Arc<ScalarFunction>, Arc<ScalarFunction>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    node: Node,
    alpha: C64,
    beta: C64,
}

fn horner(p: &[C64], x: C64) -> C64 {
    p.iter().fold(ZERO, |acc, &c| acc * x + c)
}

fn horner_deriv(p: &[C64], x: C64) -> C64 {
    let d = p.len().saturating_sub(1);
    p.iter().take(d).enumerate().fold(ZERO, |acc, (i, &c)| acc * x + c * (d - i) as f64)
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |a, b| a * b as f64)
}

/// `φ_k(x) = Σ_j x^j / (j+k)!`
pub fn phi_scalar(k: u32, x: C64) -> C64 {
    if k == 0 {
        return x.exp();
    }
    if x.norm() <= (k as f64).max(2.0) {
        let mut term = C64::new(1.0 / factorial(k), 0.0);
        let mut sum = term;
        for j in 1..400u32 {
            term = term * x / (j + k) as f64;
            sum += term;
            if term.norm() <= f64::EPSILON * 0.25 * sum.norm() {
                break;
            }
        }
        return sum;
    }
    let mut p = x.exp();
    for j in 0..k {
        p = (p - 1.0 / factorial(j)) / x;
    }
    p
}

impl ScalarFunction {
    fn leaf(kind: Kind) -> Self {
        ScalarFunction { node: Node::Leaf(kind), alpha: ONE, beta: ONE }
    }

    /// Rational function; `den` must not be the zero polynomial.
    pub fn rational(num: Vec<C64>, den: Vec<C64>) -> Result<Self> {
        if den.iter().all(|c| *c == ZERO) {
            return Err(NepError::InvalidInput("rational denominator is the zero polynomial".into()));
        }
        let num = if num.is_empty() { vec![ZERO] } else { num };
        Ok(Self::leaf(Kind::Rational { num, den }))
    }

    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        Self::rational(coeffs, vec![ONE]).expect("unit denominator")
    }

    pub fn constant(v: C64) -> Self {
        Self::polynomial(vec![v])
    }

    pub fn exp() -> Self {
        Self::leaf(Kind::Exp)
    }

    pub fn log() -> Self {
        Self::leaf(Kind::Log)
    }

    pub fn sqrt() -> Self {
        Self::leaf(Kind::Sqrt)
    }

    pub fn invsqrt() -> Self {
        Self::leaf(Kind::InvSqrt)
    }

    pub fn phi(k: u32) -> Self {
        Self::leaf(Kind::Phi(k))
    }

    pub fn combine(op: CombineOp, left: ScalarFunction, right: ScalarFunction) -> Self {
        ScalarFunction { node: Node::Combine(op, Arc::new(left), Arc::new(right)), alpha: ONE, beta: ONE }
    }

    pub fn with_scale(mut self, alpha: C64, beta: C64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn kind(&self) -> Option<&Kind> {
        match &self.node {
            Node::Leaf(k) => Some(k),
            Node::Combine(..) => None,
        }
    }

    pub fn combination(&self) -> Option<(CombineOp, &ScalarFunction, &ScalarFunction)> {
        match &self.node {
            Node::Combine(op, l, r) => Some((*op, l.as_ref(), r.as_ref())),
            Node::Leaf(_) => None,
        }
    }

    fn base_eval(&self, y: C64) -> Result<C64> {
        match &self.node {
            Node::Leaf(kind) => match kind {
                Kind::Rational { num, den } => {
                    let q = horner(den, y);
                    if q == ZERO {
                        return Err(NepError::Pole(format!("denominator vanishes at {y}")));
                    }
                    Ok(horner(num, y) / q)
                }
                Kind::Exp => Ok(y.exp()),
                Kind::Log => {
                    if y == ZERO {
                        return Err(NepError::Domain("log(0)".into()));
                    }
                    Ok(y.ln())
                }
                Kind::Sqrt => Ok(y.sqrt()),
                Kind::InvSqrt => {
                    if y == ZERO {
                        return Err(NepError::Pole("invsqrt(0)".into()));
                    }
                    Ok(1.0 / y.sqrt())
                }
                Kind::Phi(k) => Ok(phi_scalar(*k, y)),
            },
            Node::Combine(op, l, r) => match op {
                CombineOp::Add => Ok(l.eval(y)? + r.eval(y)?),
                CombineOp::Mul => Ok(l.eval(y)? * r.eval(y)?),
                CombineOp::Div => {
                    let d = r.eval(y)?;
                    if d == ZERO {
                        return Err(NepError::Pole(format!("divisor vanishes at {y}")));
                    }
                    Ok(l.eval(y)? / d)
                }
                CombineOp::Compose => l.eval(r.eval(y)?),
            },
        }
    }

    fn base_deriv(&self, y: C64) -> Result<C64> {
        match &self.node {
            Node::Leaf(kind) => match kind {
                Kind::Rational { num, den } => {
                    let q = horner(den, y);
                    if q == ZERO {
                        return Err(NepError::Pole(format!("denominator vanishes at {y}")));
                    }
                    Ok((horner_deriv(num, y) * q - horner(num, y) * horner_deriv(den, y)) / (q * q))
                }
                Kind::Exp => Ok(y.exp()),
                Kind::Log => {
                    if y == ZERO {
                        return Err(NepError::Domain("log(0)".into()));
                    }
                    Ok(1.0 / y)
                }
                Kind::Sqrt => {
                    if y == ZERO {
                        return Err(NepError::Pole("derivative of sqrt at 0".into()));
                    }
                    Ok(0.5 / y.sqrt())
                }
                Kind::InvSqrt => {
                    if y == ZERO {
                        return Err(NepError::Pole("invsqrt(0)".into()));
                    }
                    Ok(-0.5 / (y * y.sqrt()))
                }
                Kind::Phi(k) => {
                    if *k == 0 {
                        Ok(y.exp())
                    } else {
                        Ok(phi_scalar(*k, y) - phi_scalar(k + 1, y) * *k as f64)
                    }
                }
            },
            Node::Combine(op, l, r) => match op {
                CombineOp::Add => Ok(l.eval_deriv(y)? + r.eval_deriv(y)?),
                CombineOp::Mul => Ok(l.eval_deriv(y)? * r.eval(y)? + l.eval(y)? * r.eval_deriv(y)?),
                CombineOp::Div => {
                    let d = r.eval(y)?;
                    if d == ZERO {
                        return Err(NepError::Pole(format!("divisor vanishes at {y}")));
                    }
                    Ok((l.eval_deriv(y)? * d - l.eval(y)? * r.eval_deriv(y)?) / (d * d))
                }
                CombineOp::Compose => Ok(l.eval_deriv(r.eval(y)?)? * r.eval_deriv(y)?),
            },
        }
    }

    /// `β f(αx)`, principal branch for `sqrt` and `log`.
    pub fn eval(&self, x: C64) -> Result<C64> {
        Ok(self.beta * self.base_eval(self.alpha * x)?)
    }

    /// `αβ f′(αx)`
    pub fn eval_deriv(&self, x: C64) -> Result<C64> {
        Ok(self.beta * self.alpha * self.base_deriv(self.alpha * x)?)
    }

    /// Matrix function `β f(αH)` with the default dimension cap.
    pub fn eval_matrix(&self, h: &CMat) -> Result<CMat> {
        self.eval_matrix_capped(h, DEFAULT_MATFUN_CAP)
    }

    pub fn eval_matrix_capped(&self, h: &CMat, cap: usize) -> Result<CMat> {
        let n = h.nrows();
        if n != h.ncols() {
            return Err(NepError::Dimension("matrix function of a non-square matrix".into()));
        }
        if n > cap {
            return Err(NepError::TooLarge { size: n, cap });
        }
        let scaled = h * self.alpha;
        let base = match &self.node {
            Node::Leaf(kind) => matfun::leaf_matrix(kind, &scaled)?,
            Node::Combine(op, l, r) => match op {
                CombineOp::Add => l.eval_matrix_capped(&scaled, cap)? + r.eval_matrix_capped(&scaled, cap)?,
                CombineOp::Mul => l.eval_matrix_capped(&scaled, cap)?.dot(&r.eval_matrix_capped(&scaled, cap)?),
                CombineOp::Div => {
                    let num = l.eval_matrix_capped(&scaled, cap)?;
                    let den = r.eval_matrix_capped(&scaled, cap)?;
                    let lu = crate::linalg::lu::DenseLu::factor(&den.view())
                        .map_err(|_| NepError::Pole("singular divisor matrix".into()))?;
                    lu.solve_mat(&num.view())
                }
                CombineOp::Compose => {
                    let inner = r.eval_matrix_capped(&scaled, cap)?;
                    l.eval_matrix_capped(&inner, cap)?
                }
            },
        };
        Ok(base * self.beta)
    }

    /// True when every leaf is rational and combinations are sums or products
    /// (or quotients) of rationals.
    pub fn is_rational(&self) -> bool {
        match &self.node {
            Node::Leaf(Kind::Rational { .. }) => true,
            Node::Leaf(_) => false,
            Node::Combine(CombineOp::Compose, ..) => false,
            Node::Combine(_, l, r) => l.is_rational() && r.is_rational(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{c, re};

    #[test]
    fn minus_lambda_descriptor() {
        let f = ScalarFunction::polynomial(vec![re(-1.0), re(0.0)]);
        assert_eq!(f.eval(re(5.0)).unwrap(), re(-5.0));
        assert_eq!(f.eval_deriv(c(3.0, 2.0)).unwrap(), re(-1.0));
    }

    #[test]
    fn trivial_values() {
        let e = ScalarFunction::exp().with_scale(re(-0.001), ONE);
        assert_eq!(e.eval(ZERO).unwrap(), ONE);
        assert!((e.eval_deriv(ZERO).unwrap() - re(-0.001)).norm() < 1e-18);
        assert_eq!(ScalarFunction::phi(1).eval(ZERO).unwrap(), ONE);
        assert_eq!(ScalarFunction::sqrt().eval(re(4.0)).unwrap(), re(2.0));
        assert_eq!(ScalarFunction::sqrt().eval_deriv(re(4.0)).unwrap(), re(0.25));
    }

    #[test]
    fn pole_and_domain_errors() {
        let f = ScalarFunction::rational(vec![ONE], vec![ONE, re(-1.0)]).unwrap();
        assert!(matches!(f.eval(ONE), Err(NepError::Pole(_))));
        assert!(matches!(ScalarFunction::log().eval(ZERO), Err(NepError::Domain(_))));
        assert!(ScalarFunction::rational(vec![ONE], vec![ZERO, ZERO]).is_err());
    }

    #[test]
    fn principal_branch() {
        let s = ScalarFunction::sqrt().eval(re(-4.0)).unwrap();
        assert!((s - c(0.0, 2.0)).norm() < 1e-15);
        let l = ScalarFunction::log().eval(re(-1.0)).unwrap();
        assert!((l - c(0.0, std::f64::consts::PI)).norm() < 1e-15);
    }

    #[test]
    fn phi_series_and_recurrence_agree() {
        for &x in &[c(0.5, 0.1), c(-3.0, 1.0), c(2.5, -0.5), c(10.0, 0.0)] {
            // φ1 closed form
            let closed = (x.exp() - 1.0) / x;
            assert!((phi_scalar(1, x) - closed).norm() <= 1e-13 * closed.norm());
            let closed2 = (x.exp() - 1.0 - x) / (x * x);
            assert!((phi_scalar(2, x) - closed2).norm() <= 1e-12 * closed2.norm());
        }
    }

    #[test]
    fn compose_matches_definition() {
        let inner = ScalarFunction::polynomial(vec![re(2.0), re(1.0)]);
        let f = ScalarFunction::combine(CombineOp::Compose, ScalarFunction::exp(), inner);
        let x = c(0.3, 0.2);
        assert_eq!(f.eval(x).unwrap(), (x * 2.0 + 1.0).exp());
        assert!((f.eval_deriv(x).unwrap() - (x * 2.0 + 1.0).exp() * 2.0).norm() < 1e-14);
    }
}
