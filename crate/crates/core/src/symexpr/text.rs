//! Parenthesized prefix text form, e.g. `(pow (sin theta) 2)`.
//!
//! Printing emits `+`, `*`, `pow`, `neg` and the function names. The parser
//! additionally accepts binary `-` and `/` and decimal literals as input
//! sugar. Parsing builds nodes verbatim, so `parse(print(e)) == e` for every
//! expression and printing a parsed canonical string reproduces it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::expr::{Expr, Func, Node, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expression parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Node::Sym(s) => f.write_str(s),
            Node::Add(v) => write_list(f, "+", v),
            Node::Mul(v) => write_list(f, "*", v),
            Node::Pow(a, b) => write!(f, "(pow {a} {b})"),
            Node::Neg(a) => write!(f, "(neg {a})"),
            Node::Call(func, a) => write!(f, "({} {a})", func.name()),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, op: &str, v: &[Expr]) -> fmt::Result {
    write!(f, "({op}")?;
    for c in v {
        write!(f, " {c}")?;
    }
    f.write_str(")")
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Expr, ParseError> {
        Expr::parse(s)
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, len: text.len() };
        let e = p.expr()?;
        if let Some(t) = p.tokens.get(p.pos) {
            return Err(ParseError {
                offset: t.offset,
                message: "trailing input after expression".into(),
            });
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            '(' => {
                out.push(Token { tok: Tok::Open, offset: i });
                chars.next();
            }
            ')' => {
                out.push(Token { tok: Tok::Close, offset: i });
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let start = i;
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if c == '(' || c == ')' || c.is_whitespace() {
                        break;
                    }
                    end = j + c.len_utf8();
                    chars.next();
                }
                out.push(Token { tok: Tok::Atom(text[start..end].to_string()), offset: start });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset, message: message.into() })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let Some(t) = self.tokens.get(self.pos).cloned() else {
            return self.err(self.len, "unexpected end of input");
        };
        self.pos += 1;
        match t.tok {
            Tok::Close => self.err(t.offset, "unexpected `)`"),
            Tok::Atom(a) => match atom(&a) {
                Some(e) => Ok(e),
                None => self.err(t.offset, format!("invalid atom `{a}`")),
            },
            Tok::Open => {
                let Some(Token { tok: Tok::Atom(op), offset }) = self.tokens.get(self.pos).cloned() else {
                    return self.err(t.offset, "expected operator after `(`");
                };
                self.pos += 1;
                let mut args = Vec::new();
                loop {
                    match self.tokens.get(self.pos) {
                        None => return self.err(self.len, "unclosed `(`"),
                        Some(Token { tok: Tok::Close, .. }) => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => args.push(self.expr()?),
                    }
                }
                self.apply(&op, args, offset)
            }
        }
    }

    fn apply(&self, op: &str, mut args: Vec<Expr>, offset: usize) -> Result<Expr, ParseError> {
        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ParseError {
                    offset,
                    message: format!("`{op}` expects {n} argument(s), got {}", args.len()),
                })
            }
        };
        let node = match op {
            "+" => Node::Add(args),
            "*" => Node::Mul(args),
            "pow" | "^" => {
                arity(2)?;
                let b = args.pop().unwrap();
                Node::Pow(args.pop().unwrap(), b)
            }
            "neg" => {
                arity(1)?;
                Node::Neg(args.pop().unwrap())
            }
            "-" => match args.len() {
                1 => Node::Neg(args.pop().unwrap()),
                2 => {
                    let b = args.pop().unwrap();
                    Node::Add(vec![args.pop().unwrap(), Expr::from_node(Node::Neg(b))])
                }
                n => return self.err(offset, format!("`-` expects 1 or 2 arguments, got {n}")),
            },
            "/" => {
                arity(2)?;
                let b = args.pop().unwrap();
                let inv = Expr::from_node(Node::Pow(b, Expr::int(-1)));
                Node::Mul(vec![args.pop().unwrap(), inv])
            }
            name => match Func::from_name(name) {
                Some(func) => {
                    arity(1)?;
                    Node::Call(func, args.pop().unwrap())
                }
                None => return self.err(offset, format!("unknown operator `{name}`")),
            },
        };
        Ok(Expr::from_node(node))
    }
}

fn atom(a: &str) -> Option<Expr> {
    let first = a.chars().next()?;
    if first.is_ascii_alphabetic() || first == '_' {
        if a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
            return Some(Expr::symbol(a));
        }
        return None;
    }
    number(a).map(Expr::constant)
}

/// Integer, `p/q` rational, or plain decimal literal, read exactly.
fn number(a: &str) -> Option<Rational> {
    if let Some((n, d)) = a.split_once('/') {
        let n = BigInt::from_str(n).ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() || d < BigInt::zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (neg, body) = match a.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, a),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut n: BigInt = digits.parse().ok()?;
    if neg {
        n = -n;
    }
    let mut d = BigInt::one();
    for _ in 0..frac_part.len() {
        d *= 10;
    }
    Some(Rational::new(n, d))
}
