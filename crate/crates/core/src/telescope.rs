//! The telescoping lemma as a computational kernel.
//!
//! For sequences `u`, `v` with `w_k = u_k - v_k`,
//!
//! ```text
//! Σ_{k=0}^{n} (w_k/w_0) · (u_0···u_{k-1})/(v_1···v_k)
//!     = (u_0/w_0) · ((u_1···u_n)/(v_1···v_n) − v_0/u_0)
//! ```
//!
//! Both sides are evaluated independently here so they can be compared. The
//! same kernel also gives the shifted `k = 1..n` form, the "every telescoping
//! sum" characterization, and the solution of `x_{m+1} = b_m x_m + c_m`.

use crate::arith::{prod_range, Rational};
use crate::error::EvalError;

/// A sequence tabulated on the inclusive index range `lo..=hi`.
#[derive(Clone, PartialEq, Eq)]
pub struct SeqFn {
    lo: i64,
    values: Vec<Rational>,
}

impl SeqFn {
    pub fn from_values(lo: i64, values: Vec<Rational>) -> Self {
        SeqFn { lo, values }
    }

    /// Tabulates `f` on `lo..=hi`; the first failing index aborts construction.
    pub fn from_fn<F, E>(lo: i64, hi: i64, f: F) -> Result<Self, E>
    where
        F: FnMut(i64) -> Result<Rational, E>,
    {
        let values = (lo..=hi).map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(SeqFn { lo, values })
    }

    pub fn from_fn_total<F>(lo: i64, hi: i64, f: F) -> Self
    where
        F: FnMut(i64) -> Rational,
    {
        SeqFn { lo, values: (lo..=hi).map(f).collect() }
    }

    pub fn constant(value: Rational, lo: i64, hi: i64) -> Self {
        Self::from_fn_total(lo, hi, |_| value.clone())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        lo > hi || (lo >= self.lo && hi <= self.hi())
    }

    pub fn get(&self, index: i64) -> Result<&Rational, EvalError> {
        usize::try_from(index - self.lo)
            .ok()
            .and_then(|i| self.values.get(i))
            .ok_or(EvalError::OutOfDomain { index, lo: self.lo, hi: self.hi() })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `∏_{j=lo}^{hi} self[j]` with the signed-range convention.
    pub fn product(&self, lo: i64, hi: i64) -> Result<Rational, EvalError> {
        prod_range(|j| self.get(j).cloned(), lo, hi)
    }

    pub fn map(&self, mut f: impl FnMut(&Rational) -> Rational) -> SeqFn {
        SeqFn { lo: self.lo, values: self.values.iter().map(&mut f).collect() }
    }
}

impl std::fmt::Debug for SeqFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SeqFn[{}..={}]{:?}", self.lo, self.hi(), self.values)
    }
}

/// Input to the normalized lemma: `u`, `v` on a domain covering `0..=n`.
#[derive(Debug, Clone)]
pub struct TelescopeProblem {
    pub u: SeqFn,
    pub v: SeqFn,
    pub n: usize,
}

impl TelescopeProblem {
    pub fn new(u: SeqFn, v: SeqFn, n: usize) -> Result<Self, EvalError> {
        for s in [&u, &v] {
            if !s.covers(0, n as i64) {
                return Err(EvalError::OutOfDomain { index: if s.lo() > 0 { 0 } else { n as i64 }, lo: s.lo(), hi: s.hi() });
            }
        }
        Ok(TelescopeProblem { u, v, n })
    }

    pub fn w(&self, k: i64) -> Result<Rational, EvalError> {
        Ok(self.u.get(k)? - self.v.get(k)?)
    }
}

/// The individual summands `(w_k/w_0)(u_0···u_{k-1})/(v_1···v_k)` for
/// `k = 0..=n`, built with one running product.
pub fn lemma_terms(p: &TelescopeProblem) -> Result<Vec<Rational>, EvalError> {
    let w0 = p.w(0)?;
    let w0_inv = w0.recip()?;
    let mut ratio = Rational::one();
    let mut terms = Vec::with_capacity(p.n + 1);
    for k in 0..=p.n as i64 {
        if k > 0 {
            ratio = (ratio * p.u.get(k - 1)?).checked_div(p.v.get(k)?)?;
        }
        terms.push(p.w(k)? * &w0_inv * &ratio);
    }
    Ok(terms)
}

/// Left side of the normalized lemma, summed termwise.
pub fn telescoping_sum(p: &TelescopeProblem) -> Result<Rational, EvalError> {
    Ok(lemma_terms(p)?.into_iter().sum())
}

/// Right side of the normalized lemma.
pub fn telescoping_closed_form(p: &TelescopeProblem) -> Result<Rational, EvalError> {
    let u0 = p.u.get(0)?;
    let v0 = p.v.get(0)?;
    let w0 = u0 - v0;
    let n = p.n as i64;
    let ratio = p.u.product(1, n)?.checked_div(&p.v.product(1, n)?)?;
    let tail = v0.checked_div(u0)?;
    Ok(u0.checked_div(&w0)? * (ratio - tail))
}

/// Both sides of the `k = 1..n` form
/// `Σ w_k (u_1···u_{k-1})/(v_1···v_k) = (u_1···u_n)/(v_1···v_n) − 1`.
pub fn raw_euler_sum(u: &SeqFn, v: &SeqFn, n: usize) -> Result<(Rational, Rational), EvalError> {
    let n = n as i64;
    let mut lhs = Rational::zero();
    let mut ratio = Rational::one();
    for k in 1..=n {
        let w = u.get(k)? - v.get(k)?;
        // ratio = (u_1···u_{k-1})/(v_1···v_k)
        if k > 1 {
            ratio *= u.get(k - 1)?;
        }
        ratio = ratio.checked_div(v.get(k)?)?;
        lhs += w * &ratio;
    }
    let rhs = u.product(1, n)?.checked_div(&v.product(1, n)?)? - Rational::one();
    Ok((lhs, rhs))
}

/// For any `f` covering `0..=n+1`: `(f(n+1) − f(0), Σ_{k=0}^{n} (f(k+1) − f(k)))`.
pub fn sum_to_telescope(f: &SeqFn, n: usize) -> Result<(Rational, Rational), EvalError> {
    let n = n as i64;
    let boundary = f.get(n + 1)? - f.get(0)?;
    let mut sum = Rational::zero();
    for k in 0..=n {
        sum += f.get(k + 1)? - f.get(k)?;
    }
    Ok((boundary, sum))
}

/// The lemma instance `u_k = f(k+1)`, `v_k = f(k)` whose summands are
/// `(f(k+1) − f(k)) / (f(1) − f(0))`.
pub fn telescope_problem_for(f: &SeqFn, n: usize) -> Result<TelescopeProblem, EvalError> {
    let top = n as i64;
    let u = SeqFn::from_fn(0, top, |k| f.get(k + 1).cloned())?;
    let v = SeqFn::from_fn(0, top, |k| f.get(k).cloned())?;
    TelescopeProblem::new(u, v, n)
}

/// `x_{n+1}` for `x_{m+1} = b_m x_m + c_m` via the closed form
/// `x_0 b_0···b_n + (b_1···b_n) Σ_{k=0}^{n} c_k/(b_1···b_k)`.
pub fn solve_linear_recurrence(b: &SeqFn, c: &SeqFn, x0: &Rational, n: usize) -> Result<Rational, EvalError> {
    let n = n as i64;
    let mut partial = Rational::one(); // b_1···b_k
    let mut sum = Rational::zero();
    for k in 0..=n {
        if k > 0 {
            partial *= b.get(k)?;
        }
        sum += c.get(k)?.checked_div(&partial)?;
    }
    let homogeneous = x0 * b.product(0, n)?;
    Ok(homogeneous + partial * sum)
}
