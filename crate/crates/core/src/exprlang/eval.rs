use std::collections::{BTreeMap, HashMap};

use super::{BinOp, Expr, Func};
use crate::arith::{prod_range, Rational};
use crate::corpus::{q_rising_factorial, rising_factorial};
use crate::error::EvalError;
use crate::params::Params;

/// Variable binding source for [`eval_with`].
pub trait Lookup {
    fn lookup(&self, name: &str) -> Option<&Rational>;
}

impl Lookup for BTreeMap<String, Rational> {
    fn lookup(&self, name: &str) -> Option<&Rational> {
        self.get(name)
    }
}

impl Lookup for HashMap<String, Rational> {
    fn lookup(&self, name: &str) -> Option<&Rational> {
        self.get(name)
    }
}

impl Lookup for Params {
    fn lookup(&self, name: &str) -> Option<&Rational> {
        self.scalars.get(name)
    }
}

/// Innermost bindings first, then the base environment.
struct Scope<'a> {
    base: &'a dyn Lookup,
    locals: Vec<(String, Rational)>,
}

impl Scope<'_> {
    fn get(&self, name: &str) -> Result<&Rational, EvalError> {
        self.locals
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .or_else(|| self.base.lookup(name))
            .ok_or_else(|| EvalError::UnboundVariable(name.to_string()))
    }
}

pub fn eval(e: &Expr, env: &BTreeMap<String, Rational>) -> Result<Rational, EvalError> {
    eval_with(e, env)
}

pub fn eval_with(e: &Expr, env: &dyn Lookup) -> Result<Rational, EvalError> {
    eval_in(e, &mut Scope { base: env, locals: Vec::new() })
}

fn integer_arg(func: &'static str, v: &Rational) -> Result<i64, EvalError> {
    v.to_i64().filter(|_| v.is_integer()).ok_or_else(|| EvalError::InvalidArgument { func, value: v.to_string() })
}

fn count_arg(func: &'static str, v: &Rational) -> Result<i64, EvalError> {
    integer_arg(func, v).and_then(|m| if m >= 0 { Ok(m) } else { Err(EvalError::InvalidArgument { func, value: v.to_string() }) })
}

fn eval_in(e: &Expr, s: &mut Scope<'_>) -> Result<Rational, EvalError> {
    Ok(match e {
        Expr::Num(r) => r.clone(),
        Expr::Var(v) => s.get(v)?.clone(),
        Expr::Neg(a) => -eval_in(a, s)?,
        Expr::Bin(op, a, b) => {
            let x = eval_in(a, s)?;
            let y = eval_in(b, s)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x.checked_div(&y)?,
                BinOp::Pow => {
                    let exp = y.to_i64().filter(|_| y.is_integer()).ok_or_else(|| EvalError::NonIntegerExponent(y.to_string()))?;
                    x.pow(exp)?
                }
            }
        }
        Expr::Call(f, args) => {
            let vals = args.iter().map(|a| eval_in(a, s)).collect::<Result<Vec<_>, _>>()?;
            match f {
                Func::Rf => rising_factorial(&vals[0], count_arg("rf", &vals[1])?),
                Func::Qrf => q_rising_factorial(&vals[0], &vals[1], count_arg("qrf", &vals[2])?),
                Func::Binom => {
                    let m = count_arg("binom", &vals[1])?;
                    let falling = (0..m).map(|i| &vals[0] - Rational::from(i)).product::<Rational>();
                    falling.checked_div(&rising_factorial(&Rational::one(), m))?
                }
            }
        }
        Expr::Prod { var, lo, hi, body } => {
            let lo = integer_arg("prod", &eval_in(lo, s)?)?;
            let hi = integer_arg("prod", &eval_in(hi, s)?)?;
            prod_range(
                |j| {
                    s.locals.push((var.clone(), Rational::from(j)));
                    let v = eval_in(body, s);
                    s.locals.pop();
                    v
                },
                lo,
                hi,
            )?
        }
    })
}
