//! Canonicalizing constructors.
//!
//! Sums are flattened, constants folded and like terms collected. Products
//! are flattened, constants folded and equal bases merged by adding their
//! exponents. Both keep children in a deterministic order, so two trees built
//! from the same inputs compare equal structurally.

use std::collections::BTreeMap;
use std::ops;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::expr::{Expr, Func, Node, Rational};

/// Integer powers of constants are only folded below this many bits.
const MAX_FOLD_BITS: u64 = 2048;

impl Expr {
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut coeffs: BTreeMap<Expr, Rational> = BTreeMap::new();
        for t in terms {
            push_term(t, &Rational::one(), &mut constant, &mut coeffs);
        }

        let mut out = Vec::with_capacity(coeffs.len() + 1);
        let mut nested = false;
        if !constant.is_zero() {
            out.push(Expr::constant(constant));
        }
        for (rest, c) in coeffs {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                nested |= matches!(rest.node(), Node::Add(_));
                out.push(rest);
            } else {
                out.push(scaled(c, rest));
            }
        }
        if nested {
            return Expr::add(out);
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Add(out)),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut powers: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        for f in factors {
            push_factor(f, &mut coeff, &mut powers);
        }
        if coeff.is_zero() {
            return Expr::zero();
        }

        let mut out = Vec::with_capacity(powers.len() + 1);
        let mut rerun = false;
        for (base, mut exps) in powers {
            let exp = if exps.len() == 1 {
                exps.pop().unwrap()
            } else {
                Expr::add(exps)
            };
            let p = Expr::pow(base, exp);
            match p.node() {
                Node::Const(q) => coeff *= q,
                Node::Mul(_) => {
                    rerun = true;
                    out.push(p);
                }
                _ => out.push(p),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if rerun {
            out.push(Expr::constant(coeff));
            return Expr::mul(out);
        }
        if out.is_empty() {
            return Expr::constant(coeff);
        }
        if coeff.is_one() {
            if out.len() == 1 {
                return out.pop().unwrap();
            }
            return Expr::from_node(Node::Mul(out));
        }
        out.insert(0, Expr::constant(coeff));
        Expr::from_node(Node::Mul(out))
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        if exp.is_zero() {
            return Expr::one();
        }
        if exp.is_one() {
            return base;
        }
        if base.is_one() {
            return Expr::one();
        }
        if let (Some(b), Some(e)) = (base.as_const(), exp.as_const()) {
            if let Some(folded) = fold_const_pow(b, e) {
                return folded;
            }
        }
        if base.is_zero() && exp.as_const().is_some_and(Signed::is_positive) {
            return Expr::zero();
        }
        let int_exp = exp.is_integer_const();
        match base.node() {
            Node::Pow(b, e1) if int_exp => {
                return Expr::pow(b.clone(), Expr::mul(vec![e1.clone(), exp]));
            }
            Node::Call(Func::Sqrt, u) if int_exp => {
                return Expr::pow(u.clone(), Expr::mul(vec![half(), exp]));
            }
            Node::Mul(fs) if int_exp => {
                let parts = fs.iter().map(|f| Expr::pow(f.clone(), exp.clone())).collect();
                return Expr::mul(parts);
            }
            Node::Neg(a) if int_exp => {
                return Expr::mul(vec![
                    Expr::pow(Expr::int(-1), exp.clone()),
                    Expr::pow(a.clone(), exp),
                ]);
            }
            Node::Call(Func::Exp, u) => {
                return Expr::exp(Expr::mul(vec![u.clone(), exp]));
            }
            Node::Call(Func::Abs, u) if is_even_integer(&exp) => {
                return Expr::pow(u.clone(), exp);
            }
            _ => {}
        }
        Expr::from_node(Node::Pow(base, exp))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::mul(vec![Expr::int(-1), e])
    }

    pub fn recip(e: Expr) -> Expr {
        Expr::pow(e, Expr::int(-1))
    }

    pub fn powi(e: Expr, n: i64) -> Expr {
        Expr::pow(e, Expr::int(n))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        match func {
            Func::Exp => {
                if arg.is_zero() {
                    return Expr::one();
                }
                if let Node::Call(Func::Ln, u) = arg.node() {
                    return u.clone();
                }
                if let Some((c, rest)) = split_coeff(&arg) {
                    if let Node::Call(Func::Ln, u) = rest.node() {
                        return Expr::pow(u.clone(), Expr::constant(c));
                    }
                }
            }
            Func::Ln => {
                if arg.is_one() {
                    return Expr::zero();
                }
                if let Node::Call(Func::Exp, u) = arg.node() {
                    return u.clone();
                }
            }
            Func::Sin => {
                if arg.is_zero() {
                    return Expr::zero();
                }
                if has_negative_coeff(&arg) {
                    return Expr::neg(Expr::sin(Expr::neg(arg)));
                }
            }
            Func::Cos => {
                if arg.is_zero() {
                    return Expr::one();
                }
                if has_negative_coeff(&arg) {
                    return Expr::cos(Expr::neg(arg));
                }
            }
            Func::Sqrt => return Expr::pow(arg, half()),
            Func::Abs => {
                if let Some(q) = arg.as_const() {
                    return Expr::constant(q.abs());
                }
                match arg.node() {
                    Node::Call(Func::Abs | Func::Exp, _) => return arg,
                    Node::Pow(_, e) if is_even_integer(e) => return arg,
                    _ => {}
                }
                if let Some((c, rest)) = split_coeff(&arg) {
                    return Expr::mul(vec![Expr::constant(c.abs()), Expr::abs(rest)]);
                }
            }
        }
        Expr::from_node(Node::Call(func, arg))
    }

    pub fn exp(e: Expr) -> Expr {
        Expr::call(Func::Exp, e)
    }

    pub fn ln(e: Expr) -> Expr {
        Expr::call(Func::Ln, e)
    }

    pub fn sin(e: Expr) -> Expr {
        Expr::call(Func::Sin, e)
    }

    pub fn cos(e: Expr) -> Expr {
        Expr::call(Func::Cos, e)
    }

    pub fn sqrt(e: Expr) -> Expr {
        Expr::call(Func::Sqrt, e)
    }

    pub fn abs(e: Expr) -> Expr {
        Expr::call(Func::Abs, e)
    }

    /// Bottom-up rebuild through the canonicalizing constructors.
    ///
    /// Constant folding, like-term collection, `x^0 -> 1` and zero
    /// annihilation all happen here. The result is numerically equal to the
    /// input wherever the input is defined, and `simplify` is idempotent.
    pub fn simplify(&self) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Sym(_) => self.clone(),
            _ => self.map_children(Expr::simplify),
        }
    }
}

fn half() -> Expr {
    Expr::ratio(1, 2).unwrap()
}

fn is_even_integer(e: &Expr) -> bool {
    e.as_const()
        .is_some_and(|q| q.is_integer() && (q.numer() % BigInt::from(2)).is_zero())
}

/// Leading rational coefficient of a product, together with the remaining
/// factors. Returns `None` for anything that is not `c * rest`.
fn split_coeff(e: &Expr) -> Option<(Rational, Expr)> {
    if let Node::Mul(v) = e.node() {
        if v.len() >= 2 {
            if let Some(c) = v[0].as_const() {
                let rest = if v.len() == 2 {
                    v[1].clone()
                } else {
                    Expr::from_node(Node::Mul(v[1..].to_vec()))
                };
                return Some((c.clone(), rest));
            }
        }
    }
    None
}

fn has_negative_coeff(e: &Expr) -> bool {
    e.is_negative_const() || split_coeff(e).is_some_and(|(c, _)| c.is_negative())
}

fn scaled(c: Rational, rest: Expr) -> Expr {
    match rest.node() {
        Node::Mul(v) if !v.first().is_some_and(|f| f.as_const().is_some()) => {
            let mut fs = Vec::with_capacity(v.len() + 1);
            fs.push(Expr::constant(c));
            fs.extend(v.iter().cloned());
            Expr::from_node(Node::Mul(fs))
        }
        _ => Expr::from_node(Node::Mul(vec![Expr::constant(c), rest])),
    }
}

fn push_term(
    t: Expr,
    scale: &Rational,
    constant: &mut Rational,
    coeffs: &mut BTreeMap<Expr, Rational>,
) {
    match t.node() {
        Node::Const(q) => *constant += scale * q,
        Node::Add(v) => {
            for c in v {
                push_term(c.clone(), scale, constant, coeffs);
            }
        }
        Node::Neg(a) => push_term(a.clone(), &-scale, constant, coeffs),
        _ => {
            let (c, rest) = split_coeff(&t).unwrap_or_else(|| (Rational::one(), t.clone()));
            *coeffs.entry(rest).or_insert_with(Rational::zero) += scale * c;
        }
    }
}

fn push_factor(f: Expr, coeff: &mut Rational, powers: &mut BTreeMap<Expr, Vec<Expr>>) {
    match f.node() {
        Node::Const(q) => *coeff *= q,
        Node::Mul(v) => {
            for c in v {
                push_factor(c.clone(), coeff, powers);
            }
        }
        Node::Neg(a) => {
            *coeff = -coeff.clone();
            push_factor(a.clone(), coeff, powers);
        }
        Node::Pow(b, e) => powers.entry(b.clone()).or_default().push(e.clone()),
        Node::Call(Func::Sqrt, u) => powers.entry(u.clone()).or_default().push(half()),
        _ => powers.entry(f).or_default().push(Expr::one()),
    }
}

fn fold_const_pow(b: &Rational, e: &Rational) -> Option<Expr> {
    if e.is_integer() {
        let n = e.to_integer().to_i64()?;
        if b.is_zero() && n < 0 {
            return None;
        }
        let bits = b.numer().bits().max(b.denom().bits());
        if bits.saturating_mul(n.unsigned_abs()) > MAX_FOLD_BITS {
            return None;
        }
        let n = i32::try_from(n).ok()?;
        return Some(Expr::constant(Pow::pow(b, n)));
    }
    // Fractional exponent: fold only exact roots of non-negative bases.
    if b.is_negative() {
        return None;
    }
    let q = e.denom().to_u32().filter(|&q| q <= 64)?;
    let num_root = b.numer().nth_root(q);
    let den_root = b.denom().nth_root(q);
    if Pow::pow(&num_root, q) != *b.numer() || Pow::pow(&den_root, q) != *b.denom() {
        return None;
    }
    let root = Rational::new(num_root, den_root);
    if root.is_zero() {
        return if e.is_positive() { Some(Expr::zero()) } else { None };
    }
    fold_const_pow(&root, &Rational::from_integer(e.numer().clone()))
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                ops::$trait::$method(self, rhs.clone())
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                ops::$trait::$method(self.clone(), rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                ops::$trait::$method(self.clone(), rhs.clone())
            }
        }
        impl ops::$trait<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                ops::$trait::$method(self, Expr::int(rhs))
            }
        }
        impl ops::$trait<i64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                ops::$trait::$method(self.clone(), Expr::int(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add(vec![a, b]));
binop!(Sub, sub, |a, b| Expr::add(vec![a, Expr::neg(b)]));
binop!(Mul, mul, |a, b| Expr::mul(vec![a, b]));
binop!(Div, div, |a, b| Expr::mul(vec![a, Expr::recip(b)]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::symbol("x")
    }

    #[test]
    fn x_plus_zero_is_x() {
        assert_eq!(x() + 0, x());
        assert_eq!(Expr::add(vec![x(), Expr::zero()]), x());
    }

    #[test]
    fn like_terms_collect() {
        let e = &x() * 2 + &x() * 3 - x();
        assert_eq!(e, Expr::int(4) * x());
        assert_eq!(&x() - &x(), Expr::zero());
    }

    #[test]
    fn powers_merge() {
        let e = &x() * &x() * Expr::recip(x());
        assert_eq!(e, x());
        assert_eq!(Expr::pow(x(), Expr::zero()), Expr::one());
        assert_eq!(Expr::sqrt(x()) * Expr::sqrt(x()), x());
    }

    #[test]
    fn zero_annihilates() {
        let e = Expr::mul(vec![x(), Expr::zero(), Expr::sin(x())]);
        assert!(e.is_zero());
    }

    #[test]
    fn constant_folding() {
        assert_eq!(Expr::int(2) + Expr::int(3), Expr::int(5));
        assert_eq!(Expr::pow(Expr::int(4), half()), Expr::int(2));
        assert_eq!(
            Expr::pow(Expr::ratio(9, 4).unwrap(), Expr::ratio(-1, 2).unwrap()),
            Expr::ratio(2, 3).unwrap()
        );
        // irrational roots stay symbolic
        assert!(matches!(Expr::sqrt(Expr::int(2)).node(), Node::Pow(_, _)));
    }

    #[test]
    fn exp_ln_cancel() {
        assert_eq!(Expr::exp(Expr::ln(x())), x());
        assert_eq!(Expr::ln(Expr::exp(x())), x());
        let e = Expr::exp(Expr::int(2) * Expr::ln(x()));
        assert_eq!(e, Expr::powi(x(), 2));
    }

    #[test]
    fn odd_and_even_trig() {
        assert_eq!(Expr::sin(-x()), -Expr::sin(x()));
        assert_eq!(Expr::cos(-x()), Expr::cos(x()));
    }

    #[test]
    fn product_order_is_canonical() {
        let y = Expr::symbol("y");
        assert_eq!(&x() * &y, &y * &x());
        assert_eq!(&x() + &y, &y + &x());
    }
}
