//! JSON descriptors for scalar functions.
//!
//! ```json
//! {"type": "rational", "num": [-1, 0], "den": [1]}
//! {"type": "exp", "alpha": [-0.001, 0]}
//! {"combine": {"op": "mul", "left": {...}, "right": {...}}}
//! ```

use super::{CombineOp, Kind, Node, ScalarFunction};
use crate::error::{NepError, Result};
use crate::linalg::dense::{C64, ONE};
use serde_json::{json, Value};

fn bad(msg: impl Into<String>) -> NepError {
    NepError::InvalidInput(msg.into())
}

/// A number or a `[re, im]` pair.
pub fn parse_complex(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().ok_or_else(|| bad("bad number"))?, 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| bad("complex real part must be a number"))?;
            let im = a[1].as_f64().ok_or_else(|| bad("complex imaginary part must be a number"))?;
            Ok(C64::new(re, im))
        }
        _ => Err(bad(format!("expected a number or [re, im], got {v}"))),
    }
}

fn complex_json(z: C64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

fn coeffs(v: Option<&Value>, default: Vec<C64>) -> Result<Vec<C64>> {
    match v {
        None => Ok(default),
        Some(Value::Array(a)) => a.iter().map(parse_complex).collect(),
        Some(other) => Err(bad(format!("coefficient list expected, got {other}"))),
    }
}

impl ScalarFunction {
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| bad("function descriptor must be an object"))?;
        let mut f = if let Some(comb) = obj.get("combine") {
            let op = match comb.get("op").and_then(Value::as_str) {
                Some("add") => CombineOp::Add,
                Some("mul") => CombineOp::Mul,
                Some("div") => CombineOp::Div,
                Some("compose") => CombineOp::Compose,
                other => return Err(bad(format!("unknown combine op {other:?}"))),
            };
            let left = Self::from_json(comb.get("left").ok_or_else(|| bad("combine without left"))?)?;
            let right = Self::from_json(comb.get("right").ok_or_else(|| bad("combine without right"))?)?;
            Self::combine(op, left, right)
        } else {
            match obj.get("type").and_then(Value::as_str) {
                Some("rational") => {
                    Self::rational(coeffs(obj.get("num"), vec![ONE])?, coeffs(obj.get("den"), vec![ONE])?)?
                }
                Some("exp") => Self::exp(),
                Some("log") => Self::log(),
                Some("sqrt") => Self::sqrt(),
                Some("invsqrt") => Self::invsqrt(),
                Some("phi") => {
                    let k = obj.get("k").and_then(Value::as_u64).unwrap_or(0);
                    Self::phi(k as u32)
                }
                other => return Err(bad(format!("unknown function type {other:?}"))),
            }
        };
        let alpha = obj.get("alpha").map(parse_complex).transpose()?.unwrap_or(ONE);
        let beta = obj.get("beta").map(parse_complex).transpose()?.unwrap_or(ONE);
        f.alpha = alpha;
        f.beta = beta;
        Ok(f)
    }

    pub fn to_json(&self) -> Value {
        let mut v = match &self.node {
            Node::Leaf(kind) => match kind {
                Kind::Rational { num, den } => json!({
                    "type": "rational",
                    "num": num.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
                    "den": den.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
                }),
                Kind::Exp => json!({"type": "exp"}),
                Kind::Log => json!({"type": "log"}),
                Kind::Sqrt => json!({"type": "sqrt"}),
                Kind::InvSqrt => json!({"type": "invsqrt"}),
                Kind::Phi(k) => json!({"type": "phi", "k": k}),
            },
            Node::Combine(op, l, r) => {
                let op = match op {
                    CombineOp::Add => "add",
                    CombineOp::Mul => "mul",
                    CombineOp::Div => "div",
                    CombineOp::Compose => "compose",
                };
                json!({"combine": {"op": op, "left": l.to_json(), "right": r.to_json()}})
            }
        };
        if self.alpha != ONE {
            v["alpha"] = json!([self.alpha.re, self.alpha.im]);
        }
        if self.beta != ONE {
            v["beta"] = json!([self.beta.re, self.beta.im]);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::c;

    #[test]
    fn round_trip() {
        let src = json!({
            "combine": {
                "op": "div",
                "left": {"type": "rational", "num": [1, 0]},
                "right": {"type": "rational", "num": [1, [-1, 0]]}
            },
            "beta": [2.0, 0.5]
        });
        let f = ScalarFunction::from_json(&src).unwrap();
        let g = ScalarFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(f, g);
        let x = c(3.0, 1.0);
        assert!((f.eval(x).unwrap() - c(2.0, 0.5) * x / (x - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn scaled_exp() {
        let f = ScalarFunction::from_json(&json!({"type": "exp", "alpha": [-0.001, 0]})).unwrap();
        assert!((f.eval(c(1000.0, 0.0)).unwrap() - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unknown_type_rejected() {
        assert!(ScalarFunction::from_json(&json!({"type": "bessel"})).is_err());
        assert!(ScalarFunction::from_json(&json!({"combine": {"op": "pow", "left": {}, "right": {}}})).is_err());
    }
}
