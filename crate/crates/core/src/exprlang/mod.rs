//! A small expression language for summands, closed forms, certificates and
//! recurrence coefficients.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?            right-associative
//! atom    := INT | IDENT | call | '(' expr ')'
//! call    := 'rf' '(' expr ',' expr ')'
//!          | 'qrf' '(' expr ',' expr ',' expr ')'
//!          | 'binom' '(' expr ',' expr ')'
//!          | 'prod' '(' IDENT ',' expr ',' expr ',' expr ')'
//! ```
//!
//! Literals are non-negative integers; fractions are written as divisions.
//! `#` starts a comment that runs to the end of the line.

use std::collections::BTreeSet;
use std::fmt;

use crate::arith::Rational;

pub mod config;
mod eval;
mod parser;
pub mod poly;

pub use config::{load_config, load_identity_config, parse_config, ConfigError, LoadedConfig, RecurrenceConfig};
pub use eval::{eval, eval_with, Lookup};
pub use parser::{parse, SyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    /// `rf(x, m)`: rising factorial.
    Rf,
    /// `qrf(a, q, m)`: q-rising factorial.
    Qrf,
    /// `binom(x, m)`: `x(x−1)···(x−m+1)/m!`.
    Binom,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Rf => "rf",
            Func::Qrf => "qrf",
            Func::Binom => "binom",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Rf | Func::Binom => 2,
            Func::Qrf => 3,
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        match s {
            "rf" => Some(Func::Rf),
            "qrf" => Some(Func::Qrf),
            "binom" => Some(Func::Binom),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    /// `prod(var, lo, hi, body)` with the signed-range convention.
    Prod { var: String, lo: Box<Expr>, hi: Box<Expr>, body: Box<Expr> },
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(Rational::from(n))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    /// Variables not bound by an enclosing `prod`.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Expr::Neg(e) => e.collect_free(bound, out),
            Expr::Bin(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Expr::Prod { var, lo, hi, body } => {
                lo.collect_free(bound, out);
                hi.collect_free(bound, out);
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Replaces free occurrences of `name` by `value`.
    pub fn substitute(&self, name: &str, value: &Expr) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(v) if v == name => value.clone(),
            Expr::Var(_) => self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(name, value))),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.substitute(name, value), b.substitute(name, value)),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| a.substitute(name, value)).collect()),
            Expr::Prod { var, lo, hi, body } => Expr::Prod {
                var: var.clone(),
                lo: Box::new(lo.substitute(name, value)),
                hi: Box::new(hi.substitute(name, value)),
                body: Box::new(if var == name { (**body).clone() } else { body.substitute(name, value) }),
            },
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(r) if !r.is_integer() || r.is_negative() => 0,
            _ => 5,
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimal parentheses needed for `parse` to rebuild the
/// same tree. Literals that are not non-negative integers are printed in
/// parentheses and reparse as divisions or negations.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) if self.precedence() == 0 => write!(f, "({r})"),
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_wrapped(f, e, e.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let (sym, prec) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                if *op == BinOp::Pow {
                    write_wrapped(f, a, a.precedence() <= 4)?;
                    f.write_str(sym)?;
                    write_wrapped(f, b, b.precedence() < 3)
                } else {
                    write_wrapped(f, a, a.precedence() < prec)?;
                    f.write_str(sym)?;
                    write_wrapped(f, b, b.precedence() <= prec)
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::Prod { var, lo, hi, body } => write!(f, "prod({var}, {lo}, {hi}, {body})"),
        }
    }
}
