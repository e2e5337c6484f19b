use super::expr::{Expr, Func, Node};

impl Expr {
    /// Partial derivative with respect to the symbol `s`.
    ///
    /// Every other symbol is treated as a constant, so the derivative of an
    /// expression that does not mention `s` is the zero constant.
    pub fn differentiate(&self, s: &str) -> Expr {
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Sym(name) => {
                if name == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(terms) => Expr::add(terms.iter().map(|t| t.differentiate(s)).collect()),
            Node::Mul(factors) => {
                let mut terms = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    let df = f.differentiate(s);
                    if df.is_zero() {
                        continue;
                    }
                    let mut prod: Vec<Expr> = Vec::with_capacity(factors.len());
                    prod.extend(factors[..i].iter().cloned());
                    prod.push(df);
                    prod.extend(factors[i + 1..].iter().cloned());
                    terms.push(Expr::mul(prod));
                }
                Expr::add(terms)
            }
            Node::Pow(u, v) => {
                let du = u.differentiate(s);
                if !v.depends_on(s) {
                    if du.is_zero() {
                        return Expr::zero();
                    }
                    // v u^(v-1) u'
                    return Expr::mul(vec![
                        v.clone(),
                        Expr::pow(u.clone(), v - 1),
                        du,
                    ]);
                }
                let dv = v.differentiate(s);
                // u^v (v' ln u + v u'/u)
                let inner = Expr::add(vec![
                    Expr::mul(vec![dv, Expr::ln(u.clone())]),
                    Expr::mul(vec![v.clone(), du, Expr::recip(u.clone())]),
                ]);
                Expr::mul(vec![self.clone(), inner])
            }
            Node::Neg(a) => Expr::neg(a.differentiate(s)),
            Node::Call(func, u) => {
                let du = u.differentiate(s);
                if du.is_zero() {
                    return Expr::zero();
                }
                let outer = match func {
                    Func::Exp => self.clone(),
                    Func::Ln => Expr::recip(u.clone()),
                    Func::Sin => Expr::cos(u.clone()),
                    Func::Cos => -Expr::sin(u.clone()),
                    Func::Sqrt => {
                        Expr::ratio(1, 2).unwrap() * Expr::pow(u.clone(), Expr::ratio(-1, 2).unwrap())
                    }
                    Func::Abs => u / Expr::abs(u.clone()),
                };
                outer * du
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{equivalent, EquivalenceOptions, SampleDomain};
    use super::*;

    #[test]
    fn power_rule() {
        let x = Expr::symbol("x");
        let d = Expr::powi(x.clone(), 2).differentiate("x");
        assert_eq!(d, Expr::int(2) * x);
    }

    #[test]
    fn chain_rule_on_sin_squared() {
        let th = Expr::symbol("theta");
        let d = Expr::powi(Expr::sin(th.clone()), 2).differentiate("theta");
        let expected = Expr::int(2) * Expr::sin(th.clone()) * Expr::cos(th);
        assert_eq!(d, expected);
    }

    #[test]
    fn independent_expression_has_zero_derivative() {
        let e = Expr::sin(Expr::symbol("y")) * Expr::exp(Expr::symbol("M"));
        assert!(e.differentiate("x").is_zero());
    }

    #[test]
    fn variable_exponent() {
        // d/dx x^x = x^x (ln x + 1)
        let x = Expr::symbol("x");
        let e = Expr::pow(x.clone(), x.clone());
        let d = e.differentiate("x");
        let expected = e * (Expr::ln(x) + 1);
        let dom = SampleDomain::new().interval("x", 0.5, 3.0);
        let v = equivalent(&d, &expected, &dom, &EquivalenceOptions::default()).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn raw_sqrt_and_abs() {
        let x = Expr::symbol("x");
        let raw = Expr::from_node(Node::Call(Func::Sqrt, x.clone()));
        let d = raw.differentiate("x");
        let expected = Expr::recip(Expr::int(2) * Expr::sqrt(x.clone()));
        let dom = SampleDomain::new().interval("x", 0.5, 3.0);
        assert!(equivalent(&d, &expected, &dom, &EquivalenceOptions::default()).unwrap().holds);

        let a = Expr::abs(x.clone()).differentiate("x");
        let dom = SampleDomain::new().interval("x", -3.0, -0.5);
        assert!(equivalent(&a, &Expr::int(-1), &dom, &EquivalenceOptions::default()).unwrap().holds);
    }
}
