//! Automatic pole detection for rational split forms.

use crate::error::{NepError, Result};
use crate::linalg::dense::{CMat, C64, ONE, ZERO};
use crate::linalg::schur::eigvals;
use crate::nep::NepOperator;
use crate::scalarfn::{CombineOp, Kind, ScalarFunction};

/// Roots of a polynomial given from highest to lowest degree.
pub fn poly_roots(p: &[C64]) -> Result<Vec<C64>> {
    let start = p.iter().position(|c| *c != ZERO).unwrap_or(p.len());
    let p = &p[start..];
    if p.len() <= 1 {
        return Ok(Vec::new());
    }
    let m = p.len() - 1;
    let mut comp = CMat::zeros((m, m));
    for j in 0..m {
        comp[[0, j]] = -p[j + 1] / p[0];
    }
    for i in 1..m {
        comp[[i, i - 1]] = ONE;
    }
    eigvals(&comp.view())
}

fn unsupported(what: &str) -> NepError {
    NepError::Unsupported(format!("automatic singularities need rational functions ({what})"))
}

fn scaled(points: Vec<C64>, alpha: C64) -> Vec<C64> {
    if alpha == ZERO {
        // constant function
        return Vec::new();
    }
    points.into_iter().map(|z| z / alpha).collect()
}

/// Poles of `f` in its argument.
fn poles(f: &ScalarFunction) -> Result<Vec<C64>> {
    let inner = if let Some(kind) = f.kind() {
        match kind {
            Kind::Rational { den, .. } => poly_roots(den)?,
            _ => return Err(unsupported("non-rational term")),
        }
    } else {
        let (op, l, r) = f.combination().expect("combine node");
        match op {
            CombineOp::Add | CombineOp::Mul => {
                let mut v = poles(l)?;
                v.extend(poles(r)?);
                v
            }
            CombineOp::Div => {
                let mut v = poles(l)?;
                match r.kind() {
                    Some(Kind::Rational { num, .. }) => v.extend(scaled(poly_roots(num)?, r.alpha())),
                    _ => return Err(unsupported("divisor is not a rational leaf")),
                }
                v
            }
            CombineOp::Compose => return Err(unsupported("composition")),
        }
    };
    Ok(scaled(inner, f.alpha()))
}

/// Union of the poles of all `f_i`, duplicates merged at `1e-10` relative.
pub fn auto_singularities(op: &NepOperator) -> Result<Vec<C64>> {
    if !op.is_split() {
        return Err(NepError::Unsupported("automatic singularities need a split form".into()));
    }
    let mut out: Vec<C64> = Vec::new();
    for f in op.functions() {
        for z in poles(f)? {
            if !out.iter().any(|w| (w - z).norm() <= 1e-10 * w.norm().max(z.norm()).max(1e-300)) {
                out.push(z);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::re;
    use crate::linalg::sparse::{CsrMatrix, PatternHint};

    fn op_of(fs: Vec<ScalarFunction>) -> NepOperator {
        let terms = fs.into_iter().map(|f| (CsrMatrix::identity(2), f)).collect();
        NepOperator::split(terms, PatternHint::Same).unwrap()
    }

    fn sorted(mut v: Vec<C64>) -> Vec<f64> {
        let mut r: Vec<f64> = v.drain(..).map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn string_pole() {
        let f = ScalarFunction::rational(vec![re(1.0), re(0.0)], vec![re(1.0), re(-1.0)]).unwrap();
        let p = auto_singularities(&op_of(vec![ScalarFunction::constant(re(1.0)), f])).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0] - re(1.0)).norm() < 1e-14);
    }

    #[test]
    fn polynomial_has_none() {
        let p = auto_singularities(&op_of(vec![ScalarFunction::polynomial(vec![re(1.0), re(2.0), re(3.0)])])).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn product_and_quotient() {
        let a = ScalarFunction::rational(vec![re(1.0)], vec![re(1.0), re(-2.0)]).unwrap();
        let b = ScalarFunction::rational(vec![re(1.0)], vec![re(1.0), re(3.0)]).unwrap();
        let p = auto_singularities(&op_of(vec![ScalarFunction::combine(CombineOp::Mul, a.clone(), b)])).unwrap();
        assert_eq!(sorted(p).len(), 2);
        let q = ScalarFunction::polynomial(vec![re(1.0), re(-5.0)]);
        let p = auto_singularities(&op_of(vec![ScalarFunction::combine(CombineOp::Div, a, q)])).unwrap();
        let s = sorted(p);
        assert!((s[0] - 2.0).abs() < 1e-12 && (s[1] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_argument() {
        // 1/(2λ − 1) has its pole at ½
        let f = ScalarFunction::rational(vec![re(1.0)], vec![re(1.0), re(-1.0)]).unwrap().with_scale(re(2.0), re(1.0));
        let p = auto_singularities(&op_of(vec![f])).unwrap();
        assert!((p[0] - re(0.5)).norm() < 1e-14);
    }

    #[test]
    fn transcendental_is_unsupported() {
        assert!(matches!(auto_singularities(&op_of(vec![ScalarFunction::exp()])), Err(NepError::Unsupported(_))));
    }
}
