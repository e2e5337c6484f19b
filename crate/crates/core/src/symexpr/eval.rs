use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::{rational_to_f64, Expr, Func, Node};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    /// The point lies outside the domain of the expression.
    #[error("domain error: {0}")]
    Domain(String),
}

/// Symbol values for numeric evaluation. Values are finite.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Binding(BTreeMap<String, f64>);

impl Binding {
    pub fn new() -> Binding {
        Binding::default()
    }

    /// Builder-style insert.
    ///
    /// # Panics
    /// If `value` is NaN or infinite.
    pub fn with(mut self, name: impl Into<String>, value: f64) -> Binding {
        self.set(name, value);
        self
    }

    /// # Panics
    /// If `value` is NaN or infinite.
    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        assert!(value.is_finite(), "binding values must be finite");
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// `self` overlaid with every entry of `other`.
    pub fn merged(&self, other: &Binding) -> Binding {
        let mut out = self.clone();
        out.0.extend(other.0.iter().map(|(k, v)| (k.clone(), *v)));
        out
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Binding {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Binding {
        let mut b = Binding::new();
        for (k, v) in iter {
            b.set(k, v);
        }
        b
    }
}

impl Expr {
    pub fn evaluate(&self, b: &Binding) -> Result<f64, EvalError> {
        let v = match self.node() {
            Node::Const(q) => rational_to_f64(q),
            Node::Sym(s) => b
                .get(s)
                .ok_or_else(|| EvalError::UnboundSymbol(s.clone()))?,
            Node::Add(terms) => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.evaluate(b)?;
                }
                acc
            }
            Node::Mul(factors) => {
                let mut acc = 1.0;
                for f in factors {
                    acc *= f.evaluate(b)?;
                }
                acc
            }
            Node::Pow(u, v) => {
                let base = u.evaluate(b)?;
                let exp = v.evaluate(b)?;
                real_pow(base, exp)?
            }
            Node::Neg(a) => -a.evaluate(b)?,
            Node::Call(func, a) => {
                let x = a.evaluate(b)?;
                match func {
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(EvalError::Domain(format!("ln of non-positive value {x}")));
                        }
                        x.ln()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::Domain(format!("sqrt of negative value {x}")));
                        }
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Domain("non-finite intermediate value".into()))
        }
    }
}

fn real_pow(base: f64, exp: f64) -> Result<f64, EvalError> {
    if base == 0.0 && exp < 0.0 {
        return Err(EvalError::Domain("division by zero".into()));
    }
    if exp.fract() == 0.0 && exp.abs() < i32::MAX as f64 {
        return Ok(base.powi(exp as i32));
    }
    if base < 0.0 {
        return Err(EvalError::Domain(format!(
            "negative base {base} raised to non-integer power {exp}"
        )));
    }
    if exp == 0.5 {
        return Ok(base.sqrt());
    }
    if exp == -0.5 {
        return Ok(1.0 / base.sqrt());
    }
    Ok(base.powf(exp))
}
