//! Immutable symbolic expressions.
//!
//! Expressions are reference-counted trees over exact rational constants,
//! named symbols, sums, products, powers, negation and a handful of
//! elementary functions. The arithmetic constructors (`Expr::add`,
//! `Expr::mul`, `Expr::pow`, the operator overloads, ...) apply a light
//! canonicalization on the way in; [`simplify`] re-runs the same rules over
//! an arbitrary tree, including trees produced by the text parser which
//! builds nodes verbatim.
//!
//! Simplification is best-effort. Any claim that two expressions agree is
//! routed through [`equivalent`], which compares them at sampled points.

mod build;
mod diff;
mod equiv;
mod eval;
mod expr;
mod text;

pub use equiv::{deviation, equivalent, Equivalence, EquivalenceOptions, SampleDomain};
pub use eval::{Binding, EvalError};
pub use expr::{Expr, Func, Node, Rational};
pub use text::ParseError;

/// Symbolic partial derivative of `e` with respect to the symbol `s`.
pub fn differentiate(e: &Expr, s: &str) -> Expr {
    e.differentiate(s)
}

/// Numeric value of `e` at the binding `b`.
pub fn evaluate(e: &Expr, b: &Binding) -> Result<f64, EvalError> {
    e.evaluate(b)
}

/// Rebuilds `e` bottom-up through the canonicalizing constructors.
pub fn simplify(e: &Expr) -> Expr {
    e.simplify()
}
