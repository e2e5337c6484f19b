use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact constant stored in lowest terms.
pub type Rational = num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// One node of an expression tree.
///
/// The derived ordering (variant first, then payload) is the canonical order
/// used for the children of sums and products.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(Rational),
    Sym(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Expr),
    Neg(Expr),
    Call(Func, Expr),
}

/// Shared, immutable expression handle. Cloning is a reference-count bump.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl Expr {
    /// Wraps a node without any canonicalization.
    pub fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn int(v: i64) -> Expr {
        Expr::from_node(Node::Const(Rational::from_integer(BigInt::from(v))))
    }

    /// `num/den` in lowest terms; `None` when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Option<Expr> {
        if den == 0 {
            return None;
        }
        Some(Expr::constant(Rational::new(
            BigInt::from(num),
            BigInt::from(den),
        )))
    }

    pub fn constant(q: Rational) -> Expr {
        Expr::from_node(Node::Const(q))
    }

    /// Exact rational value of a finite double; `None` for NaN or ±∞.
    pub fn from_f64(v: f64) -> Option<Expr> {
        Rational::from_float(v).map(Expr::constant)
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn symbol(name: impl Into<String>) -> Expr {
        Expr::from_node(Node::Sym(name.into()))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(One::is_one)
    }

    pub fn is_integer_const(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_integer())
    }

    pub fn is_negative_const(&self) -> bool {
        self.as_const().is_some_and(Signed::is_negative)
    }

    /// Value of a constant node as `f64`.
    pub fn const_value(&self) -> Option<f64> {
        self.as_const().map(rational_to_f64)
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Sym(_) => Vec::new(),
            Node::Add(v) | Node::Mul(v) => v.iter().collect(),
            Node::Pow(a, b) => vec![a, b],
            Node::Neg(a) | Node::Call(_, a) => vec![a],
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Sym(s) => {
                out.insert(s.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_symbols(out);
                }
            }
        }
    }

    pub fn depends_on(&self, s: &str) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Sym(name) => name == s,
            _ => self.children().into_iter().any(|c| c.depends_on(s)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Expr::depth)
            .max()
            .unwrap_or(0)
    }

    /// Replaces every occurrence of the symbol `s` by `with`, rebuilding
    /// through the canonicalizing constructors.
    pub fn substitute(&self, s: &str, with: &Expr) -> Expr {
        if !self.depends_on(s) {
            return self.clone();
        }
        match self.node() {
            Node::Sym(_) => with.clone(),
            _ => self.map_children(|c| c.substitute(s, with)),
        }
    }

    /// Rebuilds this node from transformed children using the canonicalizing
    /// constructors.
    pub(crate) fn map_children(&self, mut f: impl FnMut(&Expr) -> Expr) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Sym(_) => self.clone(),
            Node::Add(v) => Expr::add(v.iter().map(&mut f).collect()),
            Node::Mul(v) => Expr::mul(v.iter().map(&mut f).collect()),
            Node::Pow(a, b) => Expr::pow(f(a), f(b)),
            Node::Neg(a) => Expr::neg(f(a)),
            Node::Call(func, a) => Expr::call(*func, f(a)),
        }
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_i64(), q.denom().to_i64()) {
        if n.unsigned_abs() < (1u64 << 53) && d < (1i64 << 53) {
            return n as f64 / d as f64;
        }
    }
    q.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Expr {
        Expr::int(v)
    }
}

impl From<&str> for Expr {
    fn from(name: &str) -> Expr {
        Expr::symbol(name)
    }
}
