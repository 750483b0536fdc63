//! Certificate-driven verification of `Σ_k F(n,k) = 1`.
//!
//! With `F = summand / rhs`, the row difference `F(n+1,k) − F(n,k)` must be
//! a constant multiple `c(n)` of the lemma summand `T(n,k)` built from the
//! certificate `(u(n,k), v(n,k))`. The constant is read off at `k = 0` and
//! checked at every `k ≤ n+1`, so no per-identity prefactor is encoded.
//! The boundary laws `u(n,n+1) = 0`, `v(n,0) = 0` make the lemma's closed
//! form vanish, which forces the row sums to be constant in `n`.

use std::sync::Arc;

use thiserror::Error;

use crate::arith::Rational;
use crate::corpus::{Certificate, IdentityDef};
use crate::error::EvalError;
use crate::params::Params;
use crate::report::Report;
use crate::sweep::{sampled_records, CheckOutcome, Mismatch, SampleSite};
use crate::telescope::{telescoping_closed_form, SeqFn, TelescopeProblem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EzError {
    #[error("identity `{0}` has no certificate")]
    NoCertificate(String),
    #[error("identity `{id}` is not summed over 0..=n")]
    Unsupported { id: String },
    #[error("inadmissible point: {0}")]
    Inadmissible(EvalError),
    #[error("evaluation failed: {0}")]
    Eval(EvalError),
    #[error("{check} failed at n={n}, k={k:?}: {detail}")]
    CheckFailed { check: &'static str, n: i64, k: Option<i64>, lhs: Rational, rhs: Rational, detail: String },
}

impl From<EvalError> for EzError {
    fn from(e: EvalError) -> Self {
        if e.is_inadmissible() {
            EzError::Inadmissible(e)
        } else {
            EzError::Eval(e)
        }
    }
}

impl From<crate::arith::ArithError> for EzError {
    fn from(e: crate::arith::ArithError) -> Self {
        EvalError::from(e).into()
    }
}

impl EzError {
    fn into_mismatch(self) -> Result<Mismatch, EvalError> {
        match self {
            EzError::CheckFailed { check, n, k, lhs, rhs, detail } => {
                let mut m = Mismatch::new(n, format!("{check}: {detail}")).sides(lhs, rhs);
                if let Some(k) = k {
                    m = m.at("k", k);
                }
                Ok(m)
            }
            EzError::Inadmissible(e) | EzError::Eval(e) => Err(e),
            other => Ok(Mismatch::new(0, other.to_string())),
        }
    }
}

fn failed(check: &'static str, n: i64, k: Option<i64>, lhs: Rational, rhs: Rational, detail: &str) -> EzError {
    EzError::CheckFailed { check, n, k, lhs, rhs, detail: detail.to_string() }
}

fn certificate(def: &IdentityDef) -> Result<&Certificate, EzError> {
    def.certificate.as_ref().ok_or_else(|| EzError::NoCertificate(def.id.clone()))
}

/// `F(n,k) = summand(n,k)/rhs(n)`.
pub fn normalized_term(def: &IdentityDef, n: i64, k: i64, p: &Params) -> Result<Rational, EvalError> {
    Ok(def.summand(n, k, p)?.checked_div(&def.rhs(n, p)?)?)
}

fn normalized_row(def: &IdentityDef, n: i64, upto: i64, p: &Params) -> Result<Vec<Rational>, EzError> {
    def.check_guard(n, p)?;
    if def.range(n, p)? != (0, n) {
        return Err(EzError::Unsupported { id: def.id.clone() });
    }
    let rhs = def.rhs(n, p)?;
    (0..=upto).map(|k| Ok(def.summand(n, k, p)?.checked_div(&rhs)?)).collect()
}

/// Certificate columns `u(n,·)`, `v(n,·)` on `0..=n+1`.
fn certificate_columns(cert: &Certificate, n: i64, p: &Params) -> Result<(SeqFn, SeqFn), EvalError> {
    let u = SeqFn::from_fn(0, n + 1, |k| (cert.u)(n, k, p))?;
    let v = SeqFn::from_fn(0, n + 1, |k| (cert.v)(n, k, p))?;
    Ok((u, v))
}

/// `T(n,k) = (w_k/w_0)(u_0···u_{k−1})/(v_1···v_k)` for `k = 0..=n+1`.
fn lemma_summands(u: &SeqFn, v: &SeqFn, n: i64) -> Result<Vec<Rational>, EvalError> {
    let p = TelescopeProblem::new(u.clone(), v.clone(), (n + 1) as usize)?;
    crate::telescope::lemma_terms(&p)
}

fn boundary_laws(u: &SeqFn, v: &SeqFn, n: i64) -> Result<(), EzError> {
    let v0 = v.get(0)?;
    if !v0.is_zero() {
        return Err(failed("boundary", n, Some(0), v0.clone(), Rational::zero(), "v(n,0) must vanish"));
    }
    let top = u.get(n + 1)?;
    if !top.is_zero() {
        return Err(failed("boundary", n, Some(n + 1), top.clone(), Rational::zero(), "u(n,n+1) must vanish"));
    }
    Ok(())
}

/// Checks `F(n+1,k) − F(n,k) = c(n)·T(n,k)` for `0 ≤ k ≤ n+1`, together with
/// both boundary laws.
pub fn ez_difference_check(def: &IdentityDef, n: i64, p: &Params) -> Result<(), EzError> {
    let cert = certificate(def)?;
    let (u, v) = certificate_columns(cert, n, p)?;
    boundary_laws(&u, &v, n).map_err(|e| match e {
        EzError::CheckFailed { n, k, lhs, rhs, detail, .. } => EzError::CheckFailed { check: "difference", n, k, lhs, rhs, detail },
        other => other,
    })?;
    let now = normalized_row(def, n, n + 1, p)?;
    let next = normalized_row(def, n + 1, n + 1, p)?;
    let t = lemma_summands(&u, &v, n)?;
    let c = (&next[0] - &now[0]).checked_div(&t[0])?;
    for k in 0..=(n + 1) as usize {
        let diff = &next[k] - &now[k];
        let expected = &c * &t[k];
        if diff != expected {
            return Err(failed("difference", n, Some(k as i64), diff, expected, "row difference is not c(n) times the lemma summand"));
        }
    }
    Ok(())
}

/// Checks that the difference row sums to zero, directly and through the
/// lemma's closed form, and that the boundary laws hold.
pub fn ez_telescope_to_zero(def: &IdentityDef, n: i64, p: &Params) -> Result<(), EzError> {
    let cert = certificate(def)?;
    let (u, v) = certificate_columns(cert, n, p)?;
    boundary_laws(&u, &v, n)?;
    let now = normalized_row(def, n, n + 1, p)?;
    let next = normalized_row(def, n + 1, n + 1, p)?;
    let direct: Rational = next.iter().zip(&now).map(|(a, b)| a - b).sum();
    if !direct.is_zero() {
        return Err(failed("telescope_zero", n, None, direct, Rational::zero(), "difference row does not sum to zero"));
    }
    let c = &next[0] - &now[0];
    let problem = TelescopeProblem::new(u, v, (n + 1) as usize)?;
    let closed = c * telescoping_closed_form(&problem)?;
    if !closed.is_zero() {
        return Err(failed("telescope_zero", n, None, closed, Rational::zero(), "c(n) times the lemma closed form is nonzero"));
    }
    Ok(())
}

/// `Σ_k F(0,k) = 1`.
pub fn ez_base_case(def: &IdentityDef, p: &Params) -> Result<(), EzError> {
    row_sum_check("base_case", def, 0, p)
}

fn row_sum_check(check: &'static str, def: &IdentityDef, n: i64, p: &Params) -> Result<(), EzError> {
    let sum: Rational = normalized_row(def, n, n, p)?.into_iter().sum();
    if !sum.is_one() {
        return Err(failed(check, n, None, sum, Rational::one(), "normalized row does not sum to one"));
    }
    Ok(())
}

pub const EZ_CHECKS: [&str; 5] = ["base_case", "difference", "boundary", "telescope_zero", "row_sum"];

fn outcome(r: Result<(), EzError>) -> Result<CheckOutcome, EvalError> {
    match r {
        Ok(()) => Ok(Ok(())),
        Err(e) => e.into_mismatch().map(Err),
    }
}

/// All five checks on rows `0..=n_max` at one point. Zero denominators abort
/// the point as inadmissible.
pub fn ez_outcomes(def: &IdentityDef, n_max: i64, p: &Params) -> Result<Vec<CheckOutcome>, EvalError> {
    let mut out = vec![outcome(ez_base_case(def, p))?, Ok(()), Ok(()), Ok(()), Ok(())];
    for n in 0..=n_max {
        let cert = def.certificate.as_ref().ok_or_else(|| EvalError::UnboundVariable("certificate".into()))?;
        let (u, v) = certificate_columns(cert, n, p)?;
        let rows = [
            ez_difference_check(def, n, p),
            boundary_laws(&u, &v, n),
            ez_telescope_to_zero(def, n, p),
            row_sum_check("row_sum", def, n, p),
        ];
        for (slot, r) in out[1..].iter_mut().zip(rows) {
            let o = outcome(r)?;
            if slot.is_ok() {
                *slot = o;
            }
        }
    }
    Ok(out)
}

/// Full EZ sweep over `samples` seeded admissible points.
pub fn ez_full_verify(def: &IdentityDef, n_max: i64, samples: u32, seed: u64) -> Result<Report, EzError> {
    certificate(def)?;
    let records = (0..samples).flat_map(|s| ez_sample(def, "ez", n_max, s, seed)).collect();
    Ok(Report::new("ez", seed, records))
}

pub fn ez_sample(def: &IdentityDef, suite: &str, n_max: i64, sample: u32, seed: u64) -> Vec<crate::report::CheckRecord> {
    let site = SampleSite { suite, identity: &def.id, seed, sample, n_max };
    sampled_records(site, &EZ_CHECKS, &def.params, |p| ez_outcomes(def, n_max, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    U,
    V,
}

/// Multiplies one certificate component by the nonconstant factor `k + shift`.
pub fn perturb_certificate(cert: &Certificate, side: Side, shift: i64) -> Certificate {
    let wrap = |f: &crate::corpus::TermFn| -> crate::corpus::TermFn {
        let f = f.clone();
        Arc::new(move |n, k, p| Ok(f(n, k, p)? * Rational::from(k + shift)))
    };
    match side {
        Side::U => Certificate { u: wrap(&cert.u), v: cert.v.clone() },
        Side::V => Certificate { u: cert.u.clone(), v: wrap(&cert.v) },
    }
}

/// Multiplies the right-hand side by `1 + n/shift`, a factor that is 1 only at `n = 0`.
pub fn perturb_rhs(def: &IdentityDef, shift: i64) -> IdentityDef {
    let rhs = def.rhs.clone();
    let mut out = def.clone();
    out.rhs = Arc::new(move |n, p| Ok(rhs(n, p)? * (Rational::one() + Rational::new(n, shift)?)));
    out
}
