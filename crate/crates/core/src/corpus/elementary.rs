//! The `n = 1` rational identities behind the summation proofs, and a
//! tester that checks them either at random points or by grid certification.

use std::collections::BTreeMap;

use crate::arith::Rational;
use crate::error::EvalError;
use crate::exprlang::poly::{certify_zero, CertifyError, Method, GRID_BUDGET};
use crate::exprlang::{eval, parse, Expr};
use crate::params::{ParamSpec, Params};
use crate::report::{CheckRecord, Report, Witness};
use crate::sweep::{sampled_records, Mismatch, SampleSite};

use super::lookup;

pub const SUITE: &str = "elementary";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryIdentity {
    pub id: &'static str,
    pub citation: &'static str,
    /// Independent variables, sampled freely.
    pub vars: Vec<String>,
    /// Variables defined from the others, substituted in order.
    pub derived: Vec<(String, Expr)>,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl ElementaryIdentity {
    fn from_src(id: &'static str, citation: &'static str, vars: &str, derived: &[(&str, &str)], lhs: &str, rhs: &str) -> Self {
        let p = |s: &str| parse(s).unwrap_or_else(|e| panic!("{id}: {e}"));
        ElementaryIdentity {
            id,
            citation,
            vars: vars.split_whitespace().map(String::from).collect(),
            derived: derived.iter().map(|(v, e)| (v.to_string(), p(e))).collect(),
            lhs: p(lhs),
            rhs: p(rhs),
        }
    }

    /// Both sides with the derived variables expanded.
    pub fn expanded(&self) -> (Expr, Expr) {
        let (mut l, mut r) = (self.lhs.clone(), self.rhs.clone());
        for (v, e) in self.derived.iter().rev() {
            l = l.substitute(v, e);
            r = r.substitute(v, e);
        }
        (l, r)
    }

    /// `(lhs, rhs)` at a point of the independent variables.
    pub fn sides(&self, point: &BTreeMap<String, Rational>) -> Result<(Rational, Rational), EvalError> {
        let mut env = point.clone();
        for (v, e) in &self.derived {
            let value = eval(e, &env)?;
            env.insert(v.clone(), value);
        }
        Ok((eval(&self.lhs, &env)?, eval(&self.rhs, &env)?))
    }
}

const TEN_PHI_NINE_LHS: &str = "1 - (1-b)*(1-c)*(1-d)*(1-e)*(1-f)*(1-a^3/(b*c*d*e*f))
    / ((1-a/b)*(1-a/c)*(1-a/d)*(1-a/e)*(1-a/f)*(1-b*c*d*e*f/a^2))";

pub fn elementary_identities() -> Vec<ElementaryIdentity> {
    vec![
        ElementaryIdentity::from_src(
            "qchv_elem",
            "(1-b)a - (1-a)b = a - b",
            "a b",
            &[],
            "(1-b)*a - (1-a)*b",
            "a - b",
        ),
        ElementaryIdentity::from_src(
            "sears_n1",
            "n = 1 case of Sears' balanced 4phi3 transformation, abc = def",
            "a b c d e",
            &[("f", "a*b*c/(d*e)")],
            "1 - (1-a)*(1-b)*(1-c)/((1-d)*(1-e)*(1-f))",
            "(1-e/a)*(1-f/a)/((1-e)*(1-f)) * a * (1 - (1-a)*(1-d/b)*(1-d/c)/((1-d)*(1-a/e)*(1-a/f)))",
        ),
        ElementaryIdentity::from_src(
            "ten_phi_nine_n1",
            "10phi9 transformation at n = 1 with a -> a/q",
            "a b c d e f",
            &[],
            TEN_PHI_NINE_LHS,
            "(1-a)*(1-a/(e*f))*(1-a^2/(b*c*d*e))*(1-a^2/(b*c*d*f))
                / ((1-a/e)*(1-a/f)*(1-a^2/(b*c*d))*(1-a^2/(b*c*d*e*f)))
             * (1 - (1-a/(b*c))*(1-a/(b*d))*(1-a/(c*d))*(1-e)*(1-f)*(1-a^3/(b*c*d*e*f))
                / ((1-a/b)*(1-a/c)*(1-a/d)*(1-a^2/(b*c*d*e))*(1-a^2/(b*c*d*f))*(1-e*f/a)))",
        ),
        ElementaryIdentity::from_src(
            "ten_phi_nine_iter",
            "the 10phi9 n = 1 relation applied twice",
            "a b c d e f",
            &[],
            TEN_PHI_NINE_LHS,
            "(1-a)*(1-d)*(1-a^2/(b*c*d*e))*(1-a^2/(b*c*d*f))*(1-a^2/(b*d*e*f))*(1-a^2/(c*d*e*f))
                / ((1-a/b)*(1-a/c)*(1-a/e)*(1-a/f)*(1-a^2/(b*c*d*e*f))*(1-a^3/(b*c*d^2*e*f)))
             * (1 - (1-a/(b*d))*(1-a/(c*d))*(1-a/(d*e))*(1-a/(d*f))*(1-a^2/(b*c*d*e*f))*(1-a^3/(b*c*d*e*f))
                / ((1-1/d)*(1-a/d)*(1-a^2/(b*c*d*e))*(1-a^2/(b*c*d*f))*(1-a^2/(b*d*e*f))*(1-a^2/(c*d*e*f))))",
        ),
        ElementaryIdentity::from_src(
            "dougall_n1",
            "q-Dougall at n = 1 with a -> a/q",
            "a b c d",
            &[],
            "(1-b)*(1-c)*(1-d)*(a^2-b*c*d)*a - (1-a)*(a-b*c)*(a-b*d)*(a-c*d)",
            "(a-b)*(a-c)*(a-d)*(a-b*c*d)",
        ),
        ElementaryIdentity::from_src(
            "dougall_symmetric",
            "symmetric form of the q-Dougall n = 1 relation",
            "x lambda mu nu",
            &[],
            "(1-x*lambda)*(1-x/lambda)*(1-mu*nu)*(1-mu/nu) - (1-x*nu)*(1-x/nu)*(1-lambda*mu)*(1-mu/lambda)",
            "mu/lambda*(1-x*mu)*(1-x/mu)*(1-lambda*nu)*(1-lambda/nu)",
        ),
    ]
}

pub fn elementary(id: &str) -> Option<ElementaryIdentity> {
    elementary_identities().into_iter().find(|e| e.id == id)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sampled,
    Grid,
}

impl Mode {
    pub fn check(self) -> &'static str {
        match self {
            Mode::Sampled => "sampled",
            Mode::Grid => "grid",
        }
    }
}

fn point_of(p: &Params) -> BTreeMap<String, Rational> {
    p.scalars.clone()
}

/// One sampled point of `e`: exact `lhs = rhs` away from poles.
pub fn elementary_sample(e: &ElementaryIdentity, sample: u32, seed: u64) -> Vec<CheckRecord> {
    let specs: Vec<ParamSpec> = e.vars.iter().map(|v| ParamSpec::free(v)).collect();
    let site = SampleSite { suite: SUITE, identity: e.id, seed, sample, n_max: 1 };
    sampled_records(site, &[Mode::Sampled.check()], &specs, |p| {
        let (lhs, rhs) = e.sides(&point_of(p))?;
        Ok(vec![if lhs == rhs { Ok(()) } else { Err(Mismatch::new(1, "lhs - rhs is nonzero").sides(lhs, rhs)) }])
    })
}

/// Grid certification of `e` as a single record.
pub fn elementary_grid(e: &ElementaryIdentity) -> CheckRecord {
    let (lhs, rhs) = e.expanded();
    let check = Mode::Grid.check();
    let p = Params::new();
    match certify_zero(&lhs, &rhs, &e.vars, GRID_BUDGET) {
        Ok(_) => CheckRecord::pass(SUITE, e.id, check, 0, 1),
        Err(CertifyError::NotZero { point, value }) => {
            let mut w = Witness::new(&p, format!("cleared numerator is {value}"));
            for (v, x) in &point {
                w = w.at(v, x);
            }
            CheckRecord::fail(SUITE, e.id, check, 0, 1, w)
        }
        Err(err) => CheckRecord::fail(SUITE, e.id, check, 0, 1, Witness::new(&p, err.to_string())),
    }
}

/// How grid mode certified `e`, for display.
pub fn certification_method(e: &ElementaryIdentity) -> Result<Method, CertifyError> {
    let (lhs, rhs) = e.expanded();
    certify_zero(&lhs, &rhs, &e.vars, GRID_BUDGET).map(|c| c.method)
}

pub fn check_rational_identity(e: &ElementaryIdentity, mode: Mode, seed: u64, samples: u32) -> Report {
    let records = match mode {
        Mode::Sampled => (0..samples).flat_map(|s| elementary_sample(e, s, seed)).collect(),
        Mode::Grid => vec![elementary_grid(e)],
    };
    Report::new(SUITE, seed, records)
}

pub const SPECIALIZATION_ID: &str = "q_dougall_n1";
pub const SPECIALIZATION_CHECKS: [&str; 3] = ["term", "rhs", "row"];

/// `U`, `V`, `W` of the `dougall_n1` relation `U - V = W`.
fn dougall_factors(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> [Rational; 3] {
    let one = Rational::one();
    let bcd = b * c * d;
    [
        (&one - b) * (&one - c) * (&one - d) * (a * a - &bcd) * a,
        (&one - a) * (a - b * c) * (a - b * d) * (a - c * d),
        (a - b) * (a - c) * (a - d) * (a - &bcd),
    ]
}

/// The `n = 1` row of the q-Dougall sum at `a ↦ a/q` against `dougall_n1`:
/// the `k = 1` term is `-U/W`, the closed form is `-V/W`, and `1 - U/W = -V/W`.
pub fn specialization_outcomes(p: &Params) -> Result<Vec<crate::sweep::CheckOutcome>, EvalError> {
    let def = lookup("q_dougall").expect("q_dougall is built in");
    let (a, b, c, d, q) = (p.get("a")?, p.get("b")?, p.get("c")?, p.get("d")?, p.get("q")?);
    let shifted = p.clone().with("a", a.checked_div(q)?);
    let term = def.summand(1, 1, &shifted)?;
    let rhs = def.rhs(1, &shifted)?;
    let [u, v, w] = dougall_factors(a, b, c, d);
    let minus_u_w = -u.checked_div(&w)?;
    let minus_v_w = -v.checked_div(&w)?;
    let cmp = |x: Rational, y: Rational, what: &str| if x == y { Ok(()) } else { Err(Mismatch::new(1, what).sides(x, y)) };
    Ok(vec![
        cmp(term.clone(), minus_u_w, "k = 1 term differs from -U/W"),
        cmp(rhs.clone(), minus_v_w, "closed form differs from -V/W"),
        cmp(Rational::one() + term, rhs, "1 + T_1 differs from the closed form"),
    ])
}

pub fn specialization_sample(sample: u32, seed: u64) -> Vec<CheckRecord> {
    let specs: Vec<ParamSpec> =
        ["a", "b", "c", "d"].iter().map(|s| ParamSpec::free(s)).chain([ParamSpec::base("q")]).collect();
    let site = SampleSite { suite: SUITE, identity: SPECIALIZATION_ID, seed, sample, n_max: 1 };
    sampled_records(site, &SPECIALIZATION_CHECKS, &specs, specialization_outcomes)
}

pub fn verify_specialization_d_zero(samples: u32, seed: u64) -> Report {
    let records = (0..samples).flat_map(|s| specialization_sample(s, seed)).collect();
    Report::new(SUITE, seed, records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn at(pairs: &[(&str, Rational)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn spot_values() {
        let q = elementary("qchv_elem").unwrap();
        let (l, rr) = q.sides(&at(&[("a", r(2, 1)), ("b", r(3, 1))])).unwrap();
        assert_eq!((l, rr), (r(-1, 1), r(-1, 1)));
        let s = elementary("dougall_symmetric").unwrap();
        let (l, rr) = s.sides(&at(&[("x", r(2, 1)), ("lambda", r(3, 1)), ("mu", r(5, 1)), ("nu", r(7, 1))])).unwrap();
        assert_eq!(l, rr);
        // the six products by hand
        let lhs = r(-5, 1) * r(1, 3) * r(-34, 1) * r(2, 7) - r(-13, 1) * r(5, 7) * r(-14, 1) * r(-2, 3);
        assert_eq!(l, lhs);
    }

    #[test]
    fn sears_enforces_balance() {
        let e = elementary("sears_n1").unwrap();
        let env = at(&[("a", r(2, 1)), ("b", r(3, 1)), ("c", r(5, 1)), ("d", r(7, 1)), ("e", r(11, 1))]);
        let (l, rr) = e.sides(&env).unwrap();
        assert_eq!(l, rr);
        // with f decoupled from abc/(de) the relation fails
        let mut free = e.clone();
        free.derived.clear();
        free.vars.push("f".into());
        let mut env = env;
        env.insert("f".into(), r(13, 1));
        let (l, rr) = free.sides(&env).unwrap();
        assert_ne!(l, rr);
    }

    #[test]
    fn sampled_mode_passes() {
        for e in elementary_identities() {
            let report = check_rational_identity(&e, Mode::Sampled, 7919, 1000);
            assert_eq!(report.records.len(), 1000);
            assert!(report.all_pass(), "{}: {:?}", e.id, report.first_failure());
        }
    }

    #[test]
    fn grid_mode_certifies() {
        for e in elementary_identities() {
            let report = check_rational_identity(&e, Mode::Grid, 0, 0);
            assert!(report.all_pass(), "{}: {:?}", e.id, report.first_failure());
        }
        assert!(matches!(certification_method(&elementary("dougall_n1").unwrap()), Ok(Method::Grid { .. })));
    }

    #[test]
    fn grid_mode_rejects_a_false_relation() {
        let mut e = elementary("dougall_n1").unwrap();
        e.rhs = parse("(a-b)*(a-c)*(a-d)*(a-b*c)").unwrap();
        assert_eq!(check_rational_identity(&e, Mode::Grid, 0, 0).records[0].status, Status::Fail);
        assert_eq!(check_rational_identity(&e, Mode::Sampled, 1, 4).totals.fail, 4);
    }

    #[test]
    fn specialization_spot_and_sweep() {
        let p = Params::new().with("q", r(2, 3)).with("a", r(5, 1)).with("b", r(2, 1)).with("c", r(3, 1)).with("d", r(7, 1));
        assert!(specialization_outcomes(&p).unwrap().iter().all(|o| o.is_ok()));
        // b = 1 kills the k = 1 term and makes the closed form 1
        let p = p.with("b", r(1, 1));
        assert!(specialization_outcomes(&p).unwrap().iter().all(|o| o.is_ok()));
        let shifted = p.clone().with("a", r(15, 2));
        let def = lookup("q_dougall").unwrap();
        assert!(def.summand(1, 1, &shifted).unwrap().is_zero());
        assert_eq!(def.rhs(1, &shifted).unwrap(), Rational::one());
        let report = verify_specialization_d_zero(32, 7919);
        assert_eq!(report.records.len(), 96);
        assert!(report.all_pass(), "{:?}", report.first_failure());
    }
}
