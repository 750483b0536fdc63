//! Deterministic certification that `lhs − rhs` is the zero rational function.
//!
//! Every subexpression is carried as a pair `(p, q)` of polynomials with value
//! `p/q`, combined without division:
//!
//! ```text
//! a + b = (p1 q2 + p2 q1, q1 q2)    a · b = (p1 p2, q1 q2)    a / b = (p1 q2, q1 p2)
//! ```
//!
//! The same rules give per-variable degree bounds for the cleared numerator
//! `N = p_l q_r − p_r q_l`. When the tensor grid prescribed by those bounds is
//! small enough it is evaluated pointwise; otherwise `N` is expanded exactly as
//! a sparse Laurent polynomial, dividing by monomials without clearing them.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::{BinOp, Expr};
use crate::arith::Rational;

/// Largest tensor grid evaluated pointwise before switching to expansion.
pub const GRID_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("not a rational expression in its variables: {0}")]
    Unsupported(String),
    #[error("lhs - rhs is not identically zero; cleared numerator is {value} at {point:?}")]
    NotZero { point: BTreeMap<String, Rational>, value: Rational },
    #[error("lhs - rhs is not identically zero; {terms} terms survive expansion")]
    NotZeroSymbolic { terms: usize },
    #[error("a denominator vanishes identically")]
    DenominatorVanishes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Grid { points: u64 },
    Symbolic { terms: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certification {
    pub vars: Vec<String>,
    /// Per-variable degree bound of the cleared numerator.
    pub degree_bounds: Vec<u32>,
    pub method: Method,
}

type Degrees = Vec<u32>;

fn const_exponent(e: &Expr) -> Result<i64, CertifyError> {
    let v = super::eval_with(e, &BTreeMap::new()).map_err(|_| CertifyError::Unsupported(format!("exponent `{e}` is not a constant")))?;
    v.to_i64()
        .filter(|_| v.is_integer())
        .ok_or_else(|| CertifyError::Unsupported(format!("exponent `{e}` is not an integer")))
}

fn zip_max(a: &Degrees, b: &Degrees) -> Degrees {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn zip_add(a: &Degrees, b: &Degrees) -> Degrees {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Degree bounds of the projective pair `(p, q)`.
fn degrees(e: &Expr, vars: &[String]) -> Result<(Degrees, Degrees), CertifyError> {
    let zero = vec![0; vars.len()];
    Ok(match e {
        Expr::Num(_) => (zero.clone(), zero),
        Expr::Var(v) => {
            let mut d = zero.clone();
            let i = vars.iter().position(|x| x == v).ok_or_else(|| CertifyError::Unsupported(format!("unknown variable `{v}`")))?;
            d[i] = 1;
            (d, zero)
        }
        Expr::Neg(a) => degrees(a, vars)?,
        Expr::Bin(op, a, b) => {
            let (p1, q1) = degrees(a, vars)?;
            if *op == BinOp::Pow {
                let k = const_exponent(b)?;
                let m = k.unsigned_abs() as u32;
                let (p, q) = (p1.iter().map(|d| d * m).collect(), q1.iter().map(|d| d * m).collect());
                return Ok(if k >= 0 { (p, q) } else { (q, p) });
            }
            let (p2, q2) = degrees(b, vars)?;
            match op {
                BinOp::Add | BinOp::Sub => (zip_max(&zip_add(&p1, &q2), &zip_add(&p2, &q1)), zip_add(&q1, &q2)),
                BinOp::Mul => (zip_add(&p1, &p2), zip_add(&q1, &q2)),
                BinOp::Div => (zip_add(&p1, &q2), zip_add(&q1, &p2)),
                BinOp::Pow => unreachable!(),
            }
        }
        Expr::Call(..) | Expr::Prod { .. } => return Err(CertifyError::Unsupported(format!("`{e}`"))),
    })
}

/// The pair `(p, q)` evaluated at a point; never divides.
fn projective(e: &Expr, point: &[Rational], vars: &[String]) -> (Rational, Rational) {
    match e {
        Expr::Num(r) => (r.clone(), Rational::one()),
        Expr::Var(v) => (point[vars.iter().position(|x| x == v).expect("checked")].clone(), Rational::one()),
        Expr::Neg(a) => {
            let (p, q) = projective(a, point, vars);
            (-p, q)
        }
        Expr::Bin(op, a, b) => {
            let (p1, q1) = projective(a, point, vars);
            if *op == BinOp::Pow {
                let k = const_exponent(b).expect("checked");
                let m = k.unsigned_abs() as i64;
                let (p, q) = (p1.pow(m).expect("non-negative"), q1.pow(m).expect("non-negative"));
                return if k >= 0 { (p, q) } else { (q, p) };
            }
            let (p2, q2) = projective(b, point, vars);
            match op {
                BinOp::Add => (&p1 * &q2 + &p2 * &q1, q1 * q2),
                BinOp::Sub => (&p1 * &q2 - &p2 * &q1, q1 * q2),
                BinOp::Mul => (p1 * p2, q1 * q2),
                BinOp::Div => (p1 * q2, q1 * p2),
                BinOp::Pow => unreachable!(),
            }
        }
        Expr::Call(..) | Expr::Prod { .. } => unreachable!("rejected by degrees()"),
    }
}

/// Certifies `lhs ≡ rhs` as rational functions in `vars`.
pub fn certify_zero(lhs: &Expr, rhs: &Expr, vars: &[String], grid_budget: u64) -> Result<Certification, CertifyError> {
    let (pl, ql) = degrees(lhs, vars)?;
    let (pr, qr) = degrees(rhs, vars)?;
    let num_bounds = zip_max(&zip_add(&pl, &qr), &zip_add(&pr, &ql));
    let den_bounds = zip_add(&ql, &qr);
    let bounds = zip_max(&num_bounds, &den_bounds);
    let points = bounds.iter().try_fold(1u64, |acc, b| acc.checked_mul(u64::from(*b) + 2));
    let method = match points {
        Some(points) if points <= grid_budget => grid(lhs, rhs, vars, &bounds)?,
        _ => symbolic(lhs, rhs, vars)?,
    };
    Ok(Certification { vars: vars.to_vec(), degree_bounds: num_bounds, method })
}

fn grid(lhs: &Expr, rhs: &Expr, vars: &[String], bounds: &[u32]) -> Result<Method, CertifyError> {
    let sizes: Vec<i64> = bounds.iter().map(|b| i64::from(*b) + 2).collect();
    let mut idx = vec![0i64; vars.len()];
    let mut count = 0u64;
    let mut den_seen = false;
    loop {
        let point: Vec<Rational> = idx.iter().map(|&i| Rational::from(i)).collect();
        let (p1, q1) = projective(lhs, &point, vars);
        let (p2, q2) = projective(rhs, &point, vars);
        let value = &p1 * &q2 - &p2 * &q1;
        if !value.is_zero() {
            let point = vars.iter().cloned().zip(point).collect();
            return Err(CertifyError::NotZero { point, value });
        }
        den_seen |= !(q1 * q2).is_zero();
        count += 1;
        // odometer increment
        let mut i = 0;
        loop {
            if i == idx.len() {
                if !den_seen {
                    return Err(CertifyError::DenominatorVanishes);
                }
                return Ok(Method::Grid { points: count });
            }
            idx[i] += 1;
            if idx[i] < sizes[i] {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Sparse Laurent polynomial: exponent vector to coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Laurent(HashMap<Vec<i32>, Rational>);

impl Laurent {
    fn constant(c: Rational, nvars: usize) -> Self {
        let mut m = HashMap::new();
        if !c.is_zero() {
            m.insert(vec![0; nvars], c);
        }
        Laurent(m)
    }

    fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Laurent(HashMap::from([(e, Rational::one())]))
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_scaled(&mut self, other: &Laurent, sign: bool) {
        for (e, c) in &other.0 {
            let entry = self.0.entry(e.clone()).or_insert_with(Rational::zero);
            if sign {
                *entry += c;
            } else {
                *entry -= c;
            }
            if entry.is_zero() {
                self.0.remove(e);
            }
        }
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        let mut out: HashMap<Vec<i32>, Rational> = HashMap::with_capacity(self.0.len() * other.0.len());
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *out.entry(e).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Laurent(out)
    }

    /// `Some((c, e))` when this is the single term `c·x^e`.
    fn as_monomial(&self) -> Option<(&Vec<i32>, &Rational)> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    fn neg(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (e.clone(), -c)).collect())
    }
}

/// `num / den` with monomial denominators folded into the numerator.
#[derive(Debug, Clone)]
struct Frac {
    num: Laurent,
    den: Laurent,
}

impl Frac {
    fn normalized(num: Laurent, den: Laurent) -> Result<Frac, CertifyError> {
        if den.is_zero() {
            return Err(CertifyError::DenominatorVanishes);
        }
        if let Some((e, c)) = den.as_monomial() {
            let inv_c = c.recip().expect("nonzero coefficient");
            let inv = Laurent(HashMap::from([(e.iter().map(|x| -x).collect(), inv_c)]));
            let nvars = e.len();
            return Ok(Frac { num: num.mul(&inv), den: Laurent::constant(Rational::one(), nvars) });
        }
        Ok(Frac { num, den })
    }

    fn add(&self, other: &Frac, sign: bool) -> Result<Frac, CertifyError> {
        if self.den == other.den {
            let mut num = self.num.clone();
            num.add_scaled(&other.num, sign);
            return Ok(Frac { num, den: self.den.clone() });
        }
        let mut num = self.num.mul(&other.den);
        num.add_scaled(&other.num.mul(&self.den), sign);
        Frac::normalized(num, self.den.mul(&other.den))
    }

    fn mul(&self, other: &Frac) -> Result<Frac, CertifyError> {
        Frac::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    fn recip(&self) -> Result<Frac, CertifyError> {
        Frac::normalized(self.den.clone(), self.num.clone())
    }

    fn pow(&self, k: i64) -> Result<Frac, CertifyError> {
        let nvars = self.num.0.keys().next().or_else(|| self.den.0.keys().next()).map_or(0, |e| e.len());
        let mut base = if k < 0 { self.recip()? } else { self.clone() };
        let mut acc = Frac { num: Laurent::constant(Rational::one(), nvars), den: Laurent::constant(Rational::one(), nvars) };
        let mut m = k.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }
}

fn expand(e: &Expr, vars: &[String]) -> Result<Frac, CertifyError> {
    let n = vars.len();
    let one = || Laurent::constant(Rational::one(), n);
    Ok(match e {
        Expr::Num(r) => Frac { num: Laurent::constant(r.clone(), n), den: one() },
        Expr::Var(v) => Frac { num: Laurent::var(vars.iter().position(|x| x == v).expect("checked"), n), den: one() },
        Expr::Neg(a) => {
            let f = expand(a, vars)?;
            Frac { num: f.num.neg(), den: f.den }
        }
        Expr::Bin(op, a, b) => {
            let x = expand(a, vars)?;
            if *op == BinOp::Pow {
                return x.pow(const_exponent(b)?);
            }
            let y = expand(b, vars)?;
            match op {
                BinOp::Add => x.add(&y, true)?,
                BinOp::Sub => x.add(&y, false)?,
                BinOp::Mul => x.mul(&y)?,
                BinOp::Div => x.mul(&y.recip()?)?,
                BinOp::Pow => unreachable!(),
            }
        }
        Expr::Call(..) | Expr::Prod { .. } => return Err(CertifyError::Unsupported(format!("`{e}`"))),
    })
}

fn symbolic(lhs: &Expr, rhs: &Expr, vars: &[String]) -> Result<Method, CertifyError> {
    let l = expand(lhs, vars)?;
    let r = expand(rhs, vars)?;
    let mut n = l.num.mul(&r.den);
    n.add_scaled(&r.num.mul(&l.den), false);
    if !n.is_zero() {
        return Err(CertifyError::NotZeroSymbolic { terms: n.0.len() });
    }
    Ok(Method::Symbolic { terms: l.num.0.len() + l.den.0.len() + r.num.0.len() + r.den.0.len() })
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn grid_certifies_small_identity() {
        let c = certify_zero(&parse("(1-b)*a - (1-a)*b").unwrap(), &parse("a - b").unwrap(), &vars(&["a", "b"]), GRID_BUDGET).unwrap();
        assert!(matches!(c.method, Method::Grid { .. }));
    }

    #[test]
    fn grid_and_symbolic_agree() {
        let good = (parse("(x^2 - 1)/(x - 1)").unwrap(), parse("x + 1").unwrap());
        let bad = (parse("(x^2 - 1)/(x - y)").unwrap(), parse("x + 1").unwrap());
        let v = vars(&["x", "y"]);
        assert!(matches!(certify_zero(&good.0, &good.1, &v, GRID_BUDGET).unwrap().method, Method::Grid { .. }));
        assert!(matches!(certify_zero(&good.0, &good.1, &v, 0).unwrap().method, Method::Symbolic { .. }));
        assert!(matches!(certify_zero(&bad.0, &bad.1, &v, GRID_BUDGET), Err(CertifyError::NotZero { .. })));
        assert!(matches!(certify_zero(&bad.0, &bad.1, &v, 0), Err(CertifyError::NotZeroSymbolic { .. })));
    }

    #[test]
    fn laurent_division_by_monomials() {
        let e = parse("(1 - a/(b*c))*b*c/a").unwrap();
        let f = parse("b*c/a - 1").unwrap();
        certify_zero(&e, &f, &vars(&["a", "b", "c"]), 0).unwrap();
    }

    #[test]
    fn vanishing_denominator_is_rejected() {
        let e = parse("1/(x - x)").unwrap();
        let v = vars(&["x"]);
        assert_eq!(certify_zero(&e, &e, &v, GRID_BUDGET), Err(CertifyError::DenominatorVanishes));
        assert_eq!(certify_zero(&e, &e, &v, 0), Err(CertifyError::DenominatorVanishes));
    }

    #[test]
    fn degree_bounds_follow_structure() {
        let (p, q) = degrees(&parse("a^3/(1 - a*b^2)").unwrap(), &vars(&["a", "b"])).unwrap();
        assert_eq!((p, q), (vec![3, 0], vec![1, 2]));
        let (p, q) = degrees(&parse("x^-2").unwrap(), &vars(&["x"])).unwrap();
        assert_eq!((p, q), (vec![0], vec![2]));
    }

    #[test]
    fn calls_are_unsupported() {
        let e = parse("rf(x, 2)").unwrap();
        assert!(matches!(certify_zero(&e, &e, &vars(&["x"]), GRID_BUDGET), Err(CertifyError::Unsupported(_))));
    }
}
