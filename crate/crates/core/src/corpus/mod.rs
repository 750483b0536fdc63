//! Terminating summation identities as data, plus the elementary rational
//! identities they specialize to.

use std::fmt;
use std::sync::Arc;

use crate::arith::Rational;
use crate::error::EvalError;
use crate::params::{ParamSpec, Params};
use crate::report::{CheckRecord, Report};
use crate::sweep::{sampled_records, CheckOutcome, Mismatch, SampleSite};

mod builtins;
pub mod elementary;

pub use builtins::builtin_identities;

/// Summand or certificate entry at `(n, k)`.
pub type TermFn = Arc<dyn Fn(i64, i64, &Params) -> Result<Rational, EvalError> + Send + Sync>;
/// Row-level quantity at `n` (the right-hand side).
pub type RowFn = Arc<dyn Fn(i64, &Params) -> Result<Rational, EvalError> + Send + Sync>;
/// Inclusive summation range at `n`.
pub type RangeFn = Arc<dyn Fn(i64, &Params) -> Result<(i64, i64), EvalError> + Send + Sync>;
/// Extra admissibility condition at `n`; a zero-denominator error rejects the point.
pub type GuardFn = Arc<dyn Fn(i64, &Params) -> Result<(), EvalError> + Send + Sync>;

/// `(x)_m = x(x+1)···(x+m−1)`.
pub fn rising_factorial(x: &Rational, m: i64) -> Rational {
    assert!(m >= 0, "rising factorial length must be non-negative");
    let mut acc = Rational::one();
    let mut t = x.clone();
    for _ in 0..m {
        acc *= &t;
        t += Rational::one();
    }
    acc
}

/// `(a;q)_m = (1−a)(1−aq)···(1−aq^{m−1})`.
pub fn q_rising_factorial(a: &Rational, q: &Rational, m: i64) -> Rational {
    assert!(m >= 0, "q-rising factorial length must be non-negative");
    let mut acc = Rational::one();
    let mut t = a.clone();
    for _ in 0..m {
        acc *= Rational::one() - &t;
        t *= q;
    }
    acc
}

/// The pair `(u(n,k), v(n,k))` whose lemma summand tracks the row difference.
#[derive(Clone)]
pub struct Certificate {
    pub u: TermFn,
    pub v: TermFn,
}

#[derive(Clone)]
pub struct IdentityDef {
    pub id: String,
    pub citation: String,
    pub params: Vec<ParamSpec>,
    pub n_max: i64,
    pub range: RangeFn,
    pub summand: TermFn,
    pub rhs: RowFn,
    pub certificate: Option<Certificate>,
    pub guard: Option<GuardFn>,
    /// Summand vanishes identically past the upper limit.
    pub terminating: bool,
}

impl fmt::Debug for IdentityDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityDef")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("n_max", &self.n_max)
            .field("certificate", &self.certificate.is_some())
            .finish()
    }
}

impl IdentityDef {
    pub fn summand(&self, n: i64, k: i64, p: &Params) -> Result<Rational, EvalError> {
        (self.summand)(n, k, p)
    }

    pub fn rhs(&self, n: i64, p: &Params) -> Result<Rational, EvalError> {
        (self.rhs)(n, p)
    }

    pub fn range(&self, n: i64, p: &Params) -> Result<(i64, i64), EvalError> {
        (self.range)(n, p)
    }

    pub fn check_guard(&self, n: i64, p: &Params) -> Result<(), EvalError> {
        match &self.guard {
            Some(g) => g(n, p),
            None => Ok(()),
        }
    }

    pub fn with_certificate(mut self, certificate: Option<Certificate>) -> Self {
        self.certificate = certificate;
        self
    }
}

/// Looks up a built-in identity by id.
pub fn lookup(id: &str) -> Option<IdentityDef> {
    builtin_identities().into_iter().find(|d| d.id == id)
}

/// `(LHS, RHS)` at row `n`: the sum is taken termwise.
pub fn evaluate_identity(def: &IdentityDef, n: i64, p: &Params) -> Result<(Rational, Rational), EvalError> {
    def.check_guard(n, p)?;
    let (lo, hi) = def.range(n, p)?;
    let mut lhs = Rational::zero();
    for k in lo..=hi {
        lhs += def.summand(n, k, p)?;
    }
    Ok((lhs, def.rhs(n, p)?))
}

pub const IDENTITY_CHECKS: [&str; 2] = ["identity", "termination"];

/// Identity and natural-termination checks for rows `0..=n_max` at one point.
///
/// Certificate entries are evaluated too, so a point where any of them has a
/// zero denominator is rejected like any other inadmissible point.
pub fn identity_outcomes(def: &IdentityDef, n_max: i64, p: &Params) -> Result<Vec<CheckOutcome>, EvalError> {
    let mut identity: CheckOutcome = Ok(());
    let mut termination: CheckOutcome = Ok(());
    for n in 0..=n_max {
        let (lhs, rhs) = evaluate_identity(def, n, p)?;
        if identity.is_ok() && lhs != rhs {
            identity = Err(Mismatch::new(n, "sum differs from closed form").sides(lhs, rhs));
        }
        if def.terminating {
            let (_, hi) = def.range(n, p)?;
            for k in hi + 1..=hi + 3 {
                let t = def.summand(n, k, p)?;
                if termination.is_ok() && !t.is_zero() {
                    termination =
                        Err(Mismatch::new(n, "summand nonzero past the upper limit").at("k", k).sides(t, Rational::zero()));
                }
            }
        }
        if let Some(cert) = &def.certificate {
            for k in 0..=n + 1 {
                (cert.u)(n, k, p)?;
                (cert.v)(n, k, p)?;
            }
        }
    }
    Ok(vec![identity, termination])
}

/// Identity sweep over `samples` seeded admissible points.
pub fn verify_identity(def: &IdentityDef, n_max: i64, samples: u32, seed: u64) -> Report {
    let records: Vec<CheckRecord> = (0..samples)
        .flat_map(|s| identity_sample(def, "corpus", n_max, s, seed))
        .collect();
    Report::new("corpus", seed, records)
}

pub fn identity_sample(def: &IdentityDef, suite: &str, n_max: i64, sample: u32, seed: u64) -> Vec<CheckRecord> {
    let checks: &[&str] = if def.terminating { &IDENTITY_CHECKS } else { &IDENTITY_CHECKS[..1] };
    let site = SampleSite { suite, identity: &def.id, seed, sample, n_max };
    sampled_records(site, checks, &def.params, |p| {
        let mut out = identity_outcomes(def, n_max, p)?;
        out.truncate(checks.len());
        Ok(out)
    })
}
