//! Three-term recurrences `x_{n+2} = a_n x_{n+1} + b_n x_n`, the six
//! generalized identities that hold for every such recurrence, and the
//! printed identity suites of the concrete families.

use std::sync::Arc;

use thiserror::Error;

use crate::arith::{prod_range, ArithError, Rational};
use crate::corpus::q_rising_factorial;
use crate::error::EvalError;
use crate::params::{ParamSpec, Params};
use crate::report::{CheckRecord, Report, Witness};
use crate::sweep::{sampled_records, CheckOutcome, Mismatch, SampleSite};
use crate::telescope::SeqFn;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceSpec {
    pub name: String,
    pub a: SeqFn,
    pub b: SeqFn,
    pub x0: Rational,
    pub x1: Rational,
}

impl RecurrenceSpec {
    pub fn new(name: &str, a: SeqFn, b: SeqFn, x0: Rational, x1: Rational) -> Self {
        RecurrenceSpec { name: name.to_string(), a, b, x0, x1 }
    }

    /// `x_0..=x_len`. Needs coefficients on `0..=len-2`.
    pub fn generate(&self, len: usize) -> Result<Vec<Rational>, EvalError> {
        let mut xs = vec![self.x0.clone(), self.x1.clone()];
        for n in 0..len.saturating_sub(1) {
            let next = self.a.get(n as i64)? * &xs[n + 1] + self.b.get(n as i64)? * &xs[n];
            xs.push(next);
        }
        xs.truncate(len + 1);
        Ok(xs)
    }

    fn from_coeffs(
        name: &str,
        upto: i64,
        a: impl Fn(i64) -> Result<Rational, ArithError>,
        b: impl Fn(i64) -> Result<Rational, ArithError>,
    ) -> Result<Self, EvalError> {
        let a = SeqFn::from_fn(0, upto, |n| a(n).map_err(EvalError::from))?;
        let b = SeqFn::from_fn(0, upto, |n| b(n).map_err(EvalError::from))?;
        Ok(RecurrenceSpec::new(name, a, b, Rational::zero(), Rational::one()))
    }
}

fn int(n: i64) -> Rational {
    Rational::from(n)
}

pub fn fibonacci(upto: i64) -> RecurrenceSpec {
    fibonacci_poly(&int(1), &int(1), upto).renamed("fibonacci")
}

pub fn pell(upto: i64) -> RecurrenceSpec {
    fibonacci_poly(&int(2), &int(1), upto).renamed("pell")
}

/// `D_{n+2} = (n+2)(D_{n+1} + D_n)`, so `D_n = d_{n+1}` for the derangement numbers `d`.
pub fn shifted_derangement(upto: i64) -> RecurrenceSpec {
    RecurrenceSpec::from_coeffs("derangement", upto, |n| Ok(int(n + 2)), |n| Ok(int(n + 2))).expect("total")
}

/// Schur's q-Fibonacci numbers `F^{(a)}`: `a_n = 1`, `b_n = q^{n+a}`.
pub fn schur_q_fib(shift: i64, q: &Rational, upto: i64) -> Result<RecurrenceSpec, EvalError> {
    RecurrenceSpec::from_coeffs("schur", upto, |_| Ok(int(1)), |n| q.pow(n + shift))
}

/// `a_n = 1 + q^{n+1}`, `b_n = q^n`.
pub fn q_pell(q: &Rational, upto: i64) -> Result<RecurrenceSpec, EvalError> {
    RecurrenceSpec::from_coeffs("q_pell", upto, |n| Ok(int(1) + q.pow(n + 1)?), |n| q.pow(n))
}

/// Goyt-Sagan: `a_n = x q^n`, `b_n = y q^{n-1}`.
pub fn goyt_sagan(x: &Rational, y: &Rational, q: &Rational, upto: i64) -> Result<RecurrenceSpec, EvalError> {
    RecurrenceSpec::from_coeffs("goyt_sagan", upto, |n| Ok(x * q.pow(n)?), |n| Ok(y * q.pow(n - 1)?))
}

/// Goyt-Mathisen: `a_n = x q^n`, `b_n = y q^{2(n-1)}`.
pub fn goyt_mathisen(x: &Rational, y: &Rational, q: &Rational, upto: i64) -> Result<RecurrenceSpec, EvalError> {
    RecurrenceSpec::from_coeffs("goyt_mathisen", upto, |n| Ok(x * q.pow(n)?), |n| Ok(y * q.pow(2 * (n - 1))?))
}

/// Fibonacci polynomials `F_n(x, y)`. `F_k(2x, -1) = U_{k-1}(x)`.
pub fn fibonacci_poly(x: &Rational, y: &Rational, upto: i64) -> RecurrenceSpec {
    RecurrenceSpec::from_coeffs("fibonacci_poly", upto, |_| Ok(x.clone()), |_| Ok(y.clone())).expect("total")
}

impl RecurrenceSpec {
    fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }
}

/// Check names of the six generalized identities, in order.
pub const LUCAS_GEN: [&str; 6] = ["sum", "even", "odd", "square", "alternating", "divided"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LucasError {
    #[error("identity number {0} is not in 1..=6")]
    UnknownIdentity(usize),
    #[error("zero denominator: {what} at j = {j}")]
    Inadmissible { j: i64, what: String },
    #[error("mismatch at n = {n}: {lhs} != {rhs}")]
    CheckFailed { n: i64, lhs: Rational, rhs: Rational },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

struct Tables<'a> {
    spec: &'a RecurrenceSpec,
    x: Vec<Rational>,
}

impl Tables<'_> {
    fn a(&self, j: i64) -> Result<&Rational, EvalError> {
        self.spec.a.get(j)
    }

    fn b(&self, j: i64) -> Result<&Rational, EvalError> {
        self.spec.b.get(j)
    }

    fn x(&self, j: i64) -> &Rational {
        &self.x[j as usize]
    }

    fn prod(&self, lo: i64, hi: i64, f: impl Fn(i64) -> Result<Rational, EvalError>) -> Result<Rational, EvalError> {
        prod_range(f, lo, hi)
    }

    /// `a_{j-1} / (a_{j-1} a_j + b_j)`.
    fn ratio(&self, j: i64) -> Result<Rational, EvalError> {
        let prev = self.a(j - 1)?;
        Ok(prev.checked_div(&(prev * self.a(j)? + self.b(j)?))?)
    }
}

fn zero_check(j: i64, what: &str, v: &Rational) -> Result<(), LucasError> {
    if v.is_zero() {
        Err(LucasError::Inadmissible { j, what: what.to_string() })
    } else {
        Ok(())
    }
}

/// Every denominator identity `which` divides by for rows up to `n_max`.
fn precheck(t: &Tables<'_>, which: usize, n_max: i64) -> Result<(), LucasError> {
    zero_check(1, "x_1", t.x(1))?;
    zero_check(2, "x_2", t.x(2))?;
    let top = if matches!(which, 2 | 3) { 2 * n_max } else { n_max };
    for j in 0..=top {
        zero_check(j, "a_j", t.a(j)?)?;
        zero_check(j, "b_j", t.b(j)?)?;
    }
    if which == 6 {
        for j in 1..=n_max {
            let d = t.a(j - 1)? * t.a(j)? + t.b(j)?;
            zero_check(j, "a_{j-1} a_j + b_j", &d)?;
        }
    }
    Ok(())
}

fn lucas_term(t: &Tables<'_>, which: usize, k: i64) -> Result<Rational, EvalError> {
    let div = |a: Rational, b: &Rational| a.checked_div(b).map_err(EvalError::from);
    Ok(match which {
        1 => div(t.b(k)? * t.x(k), &(t.prod(1, k, |j| Ok(t.a(j)?.clone()))? * t.x(2)))?,
        2 => div(t.a(2 * k - 1)? * t.x(2 * k), &(t.prod(1, k, |i| Ok(t.b(2 * i - 1)?.clone()))? * t.x(1)))?,
        3 => div(t.a(2 * k)? * t.x(2 * k + 1), &(t.prod(1, k, |i| Ok(t.b(2 * i)?.clone()))? * t.x(2)))?,
        4 => div(t.a(k)? * t.x(k + 1) * t.x(k + 1), &(t.prod(1, k, |j| Ok(t.b(j)?.clone()))? * t.x(1) * t.x(2)))?,
        5 => {
            let num = Rational::sign_power(k) * t.prod(1, k - 1, |j| Ok(t.a(j)?.clone()))? * t.x(k + 2);
            div(num, &(t.prod(1, k, |j| Ok(t.b(j)?.clone()))? * t.x(1)))?
        }
        6 => {
            let pre = div(t.b(k - 1)? * t.b(k)?, t.a(k - 1)?)?;
            div(pre * t.prod(1, k, |j| t.ratio(j))? * t.x(k - 1), t.x(2))?
        }
        _ => unreachable!("checked by caller"),
    })
}

fn lucas_rhs(t: &Tables<'_>, which: usize, n: i64) -> Result<Rational, EvalError> {
    let one = Rational::one();
    let div = |a: Rational, b: &Rational| a.checked_div(b).map_err(EvalError::from);
    Ok(match which {
        1 => div(t.x(n + 2).clone(), &(t.prod(1, n, |j| Ok(t.a(j)?.clone()))? * t.x(2)))? - one,
        2 => div(t.x(2 * n + 1).clone(), &(t.prod(1, n, |i| Ok(t.b(2 * i - 1)?.clone()))? * t.x(1)))? - one,
        3 => div(t.x(2 * n + 2).clone(), &(t.prod(1, n, |i| Ok(t.b(2 * i)?.clone()))? * t.x(2)))? - one,
        4 => div(t.x(n + 1) * t.x(n + 2), &(t.prod(1, n, |j| Ok(t.b(j)?.clone()))? * t.x(1) * t.x(2)))? - one,
        5 => {
            let num = Rational::sign_power(n) * t.prod(1, n, |j| Ok(t.a(j)?.clone()))? * t.x(n + 1);
            div(num, &(t.prod(1, n, |j| Ok(t.b(j)?.clone()))? * t.x(1)))? - one
        }
        6 => one - div(t.prod(1, n, |j| t.ratio(j))? * t.x(n + 2), t.x(2))?,
        _ => unreachable!("checked by caller"),
    })
}

fn tables(spec: &RecurrenceSpec, n_max: i64) -> Result<Tables<'_>, EvalError> {
    Ok(Tables { spec, x: spec.generate((2 * n_max + 2).max(2) as usize)? })
}

/// Both sides of generalized identity `which` (1..=6) at row `n`.
pub fn lucas_gen_sides(spec: &RecurrenceSpec, which: usize, n: i64) -> Result<(Rational, Rational), LucasError> {
    if !(1..=6).contains(&which) {
        return Err(LucasError::UnknownIdentity(which));
    }
    let t = tables(spec, n)?;
    precheck(&t, which, n)?;
    let mut lhs = Rational::zero();
    for k in 1..=n {
        lhs += lucas_term(&t, which, k)?;
    }
    Ok((lhs, lucas_rhs(&t, which, n)?))
}

/// Checks identity `which` for every row `0..=n_max`. All denominators are
/// examined before any sum is formed.
pub fn lucas_gen_check(spec: &RecurrenceSpec, which: usize, n_max: i64) -> Result<(), LucasError> {
    if !(1..=6).contains(&which) {
        return Err(LucasError::UnknownIdentity(which));
    }
    let t = tables(spec, n_max)?;
    precheck(&t, which, n_max)?;
    let mut lhs = Rational::zero();
    for n in 0..=n_max {
        if n > 0 {
            lhs += lucas_term(&t, which, n)?;
        }
        let rhs = lucas_rhs(&t, which, n)?;
        if lhs != rhs {
            return Err(LucasError::CheckFailed { n, lhs, rhs });
        }
    }
    Ok(())
}

/// One record per identity for a fixed spec.
pub fn verify_lucas_gen(spec: &RecurrenceSpec, which: usize, n_max: i64) -> Report {
    let check = LUCAS_GEN.get(which.wrapping_sub(1)).copied().unwrap_or("unknown");
    let p = Params::new();
    let record = match lucas_gen_check(spec, which, n_max) {
        Ok(()) => CheckRecord::pass("sequences", &spec.name, check, 0, n_max),
        Err(LucasError::Inadmissible { j, what }) => {
            CheckRecord::inadmissible("sequences", &spec.name, check, 0, j, Witness::new(&p, format!("{what} is zero")))
        }
        Err(LucasError::CheckFailed { n, lhs, rhs }) => {
            CheckRecord::fail("sequences", &spec.name, check, 0, n, Witness::new(&p, "sides differ").sides(lhs, rhs))
        }
        Err(e) => CheckRecord::fail("sequences", &spec.name, check, 0, 0, Witness::new(&p, e.to_string())),
    };
    Report::new("sequences", 0, vec![record])
}

pub fn lucas_outcomes(spec: &RecurrenceSpec, n_max: i64) -> Result<Vec<CheckOutcome>, EvalError> {
    let mut out = Vec::new();
    for which in 1..=6 {
        match lucas_gen_check(spec, which, n_max) {
            Ok(()) => out.push(Ok(())),
            Err(LucasError::CheckFailed { n, lhs, rhs }) => {
                out.push(Err(Mismatch::new(n, "sides differ").sides(lhs, rhs)))
            }
            Err(LucasError::Inadmissible { .. }) => return Err(ArithError::DivisionByZero.into()),
            Err(LucasError::Eval(e)) => return Err(e),
            Err(e @ LucasError::UnknownIdentity(_)) => unreachable!("{e}"),
        }
    }
    Ok(out)
}

/// Identity key for the random-recurrence sweep.
pub const RANDOM_RECURRENCE: &str = "random_recurrence";

fn random_recurrence_specs(n_max: i64) -> Vec<ParamSpec> {
    vec![
        ParamSpec::sequence("a", 0, n_max + 2),
        ParamSpec::sequence("b", 0, n_max + 2),
        ParamSpec::free("x0"),
        ParamSpec::free("x1"),
    ]
}

fn random_recurrence(p: &Params) -> Result<RecurrenceSpec, EvalError> {
    Ok(RecurrenceSpec::new(
        RANDOM_RECURRENCE,
        p.seq("a")?.clone(),
        p.seq("b")?.clone(),
        p.get("x0")?.clone(),
        p.get("x1")?.clone(),
    ))
}

/// All six generalized identities on one seeded random recurrence.
pub fn random_recurrence_sample(n_max: i64, sample: u32, seed: u64) -> Vec<CheckRecord> {
    let site = SampleSite { suite: "sequences", identity: RANDOM_RECURRENCE, seed, sample, n_max };
    sampled_records(site, &LUCAS_GEN, &random_recurrence_specs(n_max), |p| lucas_outcomes(&random_recurrence(p)?, n_max))
}

/// Values available to a family identity at one parameter point.
pub struct FamilyCtx<'a> {
    pub x: Vec<Rational>,
    pub p: &'a Params,
}

impl FamilyCtx<'_> {
    pub fn x(&self, i: i64) -> &Rational {
        &self.x[i as usize]
    }

    pub fn par(&self, name: &str) -> Result<&Rational, EvalError> {
        self.p.get(name)
    }

    pub fn q(&self) -> Result<&Rational, EvalError> {
        self.par("q")
    }
}

pub type FamilyFn = Arc<dyn Fn(&FamilyCtx<'_>, i64) -> Result<Rational, EvalError> + Send + Sync>;
pub type BuildFn = Arc<dyn Fn(&Params, i64) -> Result<RecurrenceSpec, EvalError> + Send + Sync>;

#[derive(Clone)]
pub struct FamilyIdentity {
    pub id: &'static str,
    pub display: &'static str,
    pub lo: i64,
    pub term: FamilyFn,
    pub rhs: FamilyFn,
}

#[derive(Clone)]
pub struct Family {
    pub name: &'static str,
    pub citation: &'static str,
    pub params: Vec<ParamSpec>,
    pub n_max: i64,
    pub build: BuildFn,
    pub identities: Vec<FamilyIdentity>,
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ids: Vec<&str> = self.identities.iter().map(|i| i.id).collect();
        f.debug_struct("Family").field("name", &self.name).field("identities", &ids).finish()
    }
}

fn ident(
    id: &'static str,
    display: &'static str,
    lo: i64,
    term: impl Fn(&FamilyCtx<'_>, i64) -> Result<Rational, EvalError> + Send + Sync + 'static,
    rhs: impl Fn(&FamilyCtx<'_>, i64) -> Result<Rational, EvalError> + Send + Sync + 'static,
) -> FamilyIdentity {
    FamilyIdentity { id, display, lo, term: Arc::new(term), rhs: Arc::new(rhs) }
}

fn div(a: Rational, b: Rational) -> Result<Rational, EvalError> {
    Ok(a.checked_div(&b)?)
}

fn sq(r: &Rational) -> Rational {
    r * r
}

fn sign(k: i64) -> Rational {
    Rational::sign_power(k)
}

fn binom2(k: i64) -> i64 {
    k * (k - 1) / 2
}

fn factorial(m: i64) -> Rational {
    (1..=m).map(int).product()
}

/// `1·3···(2m-1)` and `2·4···(2m)`.
fn odd_product(m: i64) -> Rational {
    (1..=m).map(|j| int(2 * j - 1)).product()
}

fn even_product(m: i64) -> Rational {
    (1..=m).map(|j| int(2 * j)).product()
}

fn fibonacci_family() -> Family {
    let one = Rational::one;
    Family {
        name: "fibonacci",
        citation: "Lucas (1876) Fibonacci identities",
        params: vec![],
        n_max: 20,
        build: Arc::new(|_, upto| Ok(fibonacci(upto))),
        identities: vec![
            ident("sum", "Σ F_k = F_{n+2} - 1", 1, |c, k| Ok(c.x(k).clone()), move |c, n| Ok(c.x(n + 2) - one())),
            ident("even", "Σ F_{2k} = F_{2n+1} - 1", 1, |c, k| Ok(c.x(2 * k).clone()), move |c, n| Ok(c.x(2 * n + 1) - one())),
            ident("odd", "Σ F_{2k-1} = F_{2n}", 1, |c, k| Ok(c.x(2 * k - 1).clone()), |c, n| Ok(c.x(2 * n).clone())),
            ident("square", "Σ F_k² = F_n F_{n+1}", 1, |c, k| Ok(sq(c.x(k))), |c, n| Ok(c.x(n) * c.x(n + 1))),
            ident(
                "alternating",
                "Σ (-1)^{k+1} F_{k+1} = (-1)^{n-1} F_n",
                1,
                |c, k| Ok(sign(k + 1) * c.x(k + 1)),
                |c, n| Ok(sign(n - 1) * c.x(n)),
            ),
            ident(
                "divided",
                "Σ F_{k-1}/2^k = 1 - F_{n+2}/2^n",
                1,
                |c, k| div(c.x(k - 1).clone(), int(2).pow(k)?),
                move |c, n| Ok(one() - div(c.x(n + 2).clone(), int(2).pow(n)?)?),
            ),
        ],
    }
}

fn derangement_family() -> Family {
    let one = Rational::one;
    Family {
        name: "derangement",
        citation: "shifted derangement numbers D_{n+2} = (n+2)D_{n+1} + (n+2)D_n",
        params: vec![],
        n_max: 20,
        build: Arc::new(|_, upto| Ok(shifted_derangement(upto))),
        identities: vec![
            ident(
                "sum",
                "Σ D_k/(k+1)! = D_{n+2}/(n+2)! - 1",
                1,
                |c, k| div(c.x(k).clone(), factorial(k + 1)),
                move |c, n| Ok(div(c.x(n + 2).clone(), factorial(n + 2))? - one()),
            ),
            ident(
                "even",
                "Σ D_{2k}/(1·3···(2k-1)) = D_{2n+1}/(1·3···(2n+1)) - 1",
                1,
                |c, k| div(c.x(2 * k).clone(), odd_product(k)),
                move |c, n| Ok(div(c.x(2 * n + 1).clone(), odd_product(n + 1))? - one()),
            ),
            ident(
                "odd",
                "Σ D_{2k+1}/(2·4···(2k)) = D_{2n+2}/(2·4···(2n+2)) - 1",
                1,
                |c, k| div(c.x(2 * k + 1).clone(), even_product(k)),
                move |c, n| Ok(div(c.x(2 * n + 2).clone(), even_product(n + 1))? - one()),
            ),
            ident(
                "square",
                "Σ D_{k+1}²/(k+1)! = D_{n+1}D_{n+2}/(n+2)! - 1",
                1,
                |c, k| div(sq(c.x(k + 1)), factorial(k + 1)),
                move |c, n| Ok(div(c.x(n + 1) * c.x(n + 2), factorial(n + 2))? - one()),
            ),
            ident(
                "alternating",
                "Σ (-1)^k D_{k+2}/(k+2) = (-1)^n D_{n+1} - 1",
                1,
                |c, k| div(sign(k) * c.x(k + 2), int(k + 2)),
                move |c, n| Ok(sign(n) * c.x(n + 1) - one()),
            ),
            ident(
                "divided",
                "Σ 2D_{k-1}/((k+2)(k+1)!) = 1 - 2D_{n+2}/((n+2)(n+2)!)",
                1,
                |c, k| div(int(2) * c.x(k - 1), int(k + 2) * factorial(k + 1)),
                move |c, n| Ok(one() - div(int(2) * c.x(n + 2), int(n + 2) * factorial(n + 2))?),
            ),
        ],
    }
}

fn pell_family() -> Family {
    let one = Rational::one;
    let two = || int(2);
    Family {
        name: "pell",
        citation: "Pell number identities",
        params: vec![],
        n_max: 20,
        build: Arc::new(|_, upto| Ok(pell(upto))),
        identities: vec![
            ident(
                "sum",
                "Σ P_k/2^{k+1} = P_{n+2}/2^{n+1} - 1",
                1,
                move |c, k| div(c.x(k).clone(), two().pow(k + 1)?),
                move |c, n| Ok(div(c.x(n + 2).clone(), two().pow(n + 1)?)? - one()),
            ),
            ident("even", "Σ 2P_{2k} = P_{2n+1} - 1", 1, move |c, k| Ok(two() * c.x(2 * k)), move |c, n| Ok(c.x(2 * n + 1) - one())),
            ident("odd", "Σ 2P_{2k-1} = P_{2n}", 1, move |c, k| Ok(two() * c.x(2 * k - 1)), |c, n| Ok(c.x(2 * n).clone())),
            ident("square", "Σ 2P_k² = P_n P_{n+1}", 1, move |c, k| Ok(two() * sq(c.x(k))), |c, n| Ok(c.x(n) * c.x(n + 1))),
            ident(
                "alternating",
                "Σ_{k=0} (-1)^k 2^{k-1} P_{k+2} = (-1)^n 2^n P_{n+1}",
                0,
                move |c, k| Ok(sign(k) * two().pow(k - 1)? * c.x(k + 2)),
                move |c, n| Ok(sign(n) * two().pow(n)? * c.x(n + 1)),
            ),
            ident(
                "divided",
                "Σ (2/5)^k P_{k-1}/2² = 1 - (2/5)^n P_{n+2}/2",
                1,
                |c, k| div(Rational::new(2, 5)?.pow(k)? * c.x(k - 1), int(4)),
                move |c, n| Ok(one() - div(Rational::new(2, 5)?.pow(n)? * c.x(n + 2), int(2))?),
            ),
        ],
    }
}

fn schur_family() -> Family {
    let one = Rational::one;
    let shift = |c: &FamilyCtx<'_>| c.p.int("a");
    Family {
        name: "schur",
        citation: "Schur's q-Fibonacci numbers F^{(a)}_n(q)",
        params: vec![ParamSpec::base("q"), ParamSpec::natural("a", 0, 4)],
        n_max: 12,
        build: Arc::new(|p, upto| schur_q_fib(p.int("a")?, p.get("q")?, upto)),
        identities: vec![
            ident(
                "sum",
                "Σ q^{k+a} F_k = F_{n+2} - 1",
                1,
                move |c, k| Ok(c.q()?.pow(k + shift(c)?)? * c.x(k)),
                move |c, n| Ok(c.x(n + 2) - one()),
            ),
            ident(
                "even",
                "Σ q^{-k²-ka} F_{2k} = q^{-n²-na} F_{2n+1} - 1",
                1,
                move |c, k| Ok(c.q()?.pow(-k * k - k * shift(c)?)? * c.x(2 * k)),
                move |c, n| Ok(c.q()?.pow(-n * n - n * shift(c)?)? * c.x(2 * n + 1) - one()),
            ),
            ident(
                "odd",
                "Σ q^{-(k-1)(k+a)} F_{2k-1} = q^{-(n-1)(n+a)} F_{2n}",
                1,
                move |c, k| Ok(c.q()?.pow(-(k - 1) * (k + shift(c)?))? * c.x(2 * k - 1)),
                move |c, n| Ok(c.q()?.pow(-(n - 1) * (n + shift(c)?))? * c.x(2 * n)),
            ),
            ident(
                "square",
                "Σ q^{-C(k,2)-(k-1)a} F_k² = q^{-C(n,2)-(n-1)a} F_n F_{n+1}",
                1,
                move |c, k| Ok(c.q()?.pow(-binom2(k) - (k - 1) * shift(c)?)? * sq(c.x(k))),
                move |c, n| Ok(c.q()?.pow(-binom2(n) - (n - 1) * shift(c)?)? * c.x(n) * c.x(n + 1)),
            ),
            ident(
                "alternating",
                "Σ (-1)^{k-1} q^{-C(k,2)-(k-1)a} F_{k+1} = (-1)^{n-1} q^{-C(n,2)-(n-1)a} F_n",
                1,
                move |c, k| Ok(sign(k - 1) * c.q()?.pow(-binom2(k) - (k - 1) * shift(c)?)? * c.x(k + 1)),
                move |c, n| Ok(sign(n - 1) * c.q()?.pow(-binom2(n) - (n - 1) * shift(c)?)? * c.x(n)),
            ),
            ident(
                "divided",
                "Σ q^{2k-1+2a} F_{k-1}/(-q^{a+1};q)_k = 1 - F_{n+2}/(-q^{a+1};q)_n",
                1,
                move |c, k| {
                    let (q, a) = (c.q()?, shift(c)?);
                    div(q.pow(2 * k - 1 + 2 * a)? * c.x(k - 1), q_rising_factorial(&-q.pow(a + 1)?, q, k))
                },
                move |c, n| {
                    let (q, a) = (c.q()?, shift(c)?);
                    Ok(one() - div(c.x(n + 2).clone(), q_rising_factorial(&-q.pow(a + 1)?, q, n))?)
                },
            ),
        ],
    }
}

fn q_pell_family() -> Family {
    let one = Rational::one;
    // (1 + q^j) / (1 + 2q^j + q^{j+1} + q^{2j+1})
    let ratio = |q: &Rational, j: i64| -> Result<Rational, EvalError> {
        let qj = q.pow(j)?;
        div(int(1) + &qj, int(1) + int(2) * &qj + q.pow(j + 1)? + q.pow(2 * j + 1)?)
    };
    Family {
        name: "q_pell",
        citation: "q-Pell numbers P_n(q), Santos-Sills with shifted initial values",
        params: vec![ParamSpec::base("q")],
        n_max: 12,
        build: Arc::new(|p, upto| q_pell(p.get("q")?, upto)),
        identities: vec![
            ident(
                "sum",
                "Σ q^k P_k/(-q;q)_{k+1} = P_{n+2}/(-q;q)_{n+1} - 1",
                1,
                |c, k| {
                    let q = c.q()?;
                    div(q.pow(k)? * c.x(k), q_rising_factorial(&-q, q, k + 1))
                },
                move |c, n| {
                    let q = c.q()?;
                    Ok(div(c.x(n + 2).clone(), q_rising_factorial(&-q, q, n + 1))? - one())
                },
            ),
            ident(
                "even",
                "Σ (1+q^{2k}) q^{-k²} P_{2k} = q^{-n²} P_{2n+1} - 1",
                1,
                |c, k| {
                    let q = c.q()?;
                    Ok((int(1) + q.pow(2 * k)?) * q.pow(-k * k)? * c.x(2 * k))
                },
                move |c, n| Ok(c.q()?.pow(-n * n)? * c.x(2 * n + 1) - one()),
            ),
            ident(
                "odd",
                "Σ_{k=0} (1+q^{2k+1}) q^{-k(k+1)} P_{2k+1} = q^{-n(n+1)} P_{2n+2}",
                0,
                |c, k| {
                    let q = c.q()?;
                    Ok((int(1) + q.pow(2 * k + 1)?) * q.pow(-k * (k + 1))? * c.x(2 * k + 1))
                },
                |c, n| Ok(c.q()?.pow(-n * (n + 1))? * c.x(2 * n + 2)),
            ),
            ident(
                "square",
                "Σ (1+q^k) q^{-C(k,2)} P_k² = q^{-C(n,2)} P_n P_{n+1}",
                1,
                |c, k| {
                    let q = c.q()?;
                    Ok((int(1) + q.pow(k)?) * q.pow(-binom2(k))? * sq(c.x(k)))
                },
                |c, n| Ok(c.q()?.pow(-binom2(n))? * c.x(n) * c.x(n + 1)),
            ),
            ident(
                "alternating",
                "Σ_{k=0} (-1)^k q^{-C(k+1,2)} (-q;q)_k P_{k+2} = (-1)^n q^{-C(n+1,2)} (-q;q)_{n+1} P_{n+1}",
                0,
                |c, k| {
                    let q = c.q()?;
                    Ok(sign(k) * q.pow(-binom2(k + 1))? * q_rising_factorial(&-q, q, k) * c.x(k + 2))
                },
                |c, n| {
                    let q = c.q()?;
                    Ok(sign(n) * q.pow(-binom2(n + 1))? * q_rising_factorial(&-q, q, n + 1) * c.x(n + 1))
                },
            ),
            ident(
                "divided",
                "Σ q^{2k-1}/(1+q^k) Π_{j≤k} r_j P_{k-1}/(1+q) = 1 - Π_{j≤n} r_j P_{n+2}/(1+q)",
                1,
                move |c, k| {
                    let q = c.q()?;
                    let pre = div(q.pow(2 * k - 1)?, int(1) + q.pow(k)?)?;
                    div(pre * prod_range(|j| ratio(q, j), 1, k)? * c.x(k - 1), int(1) + q)
                },
                move |c, n| {
                    let q = c.q()?;
                    Ok(one() - div(prod_range(|j| ratio(q, j), 1, n)? * c.x(n + 2), int(1) + q)?)
                },
            ),
        ],
    }
}

fn xyq<'a>(c: &'a FamilyCtx<'_>) -> Result<(&'a Rational, &'a Rational, &'a Rational), EvalError> {
    Ok((c.par("x")?, c.par("y")?, c.q()?))
}

fn goyt_sagan_family() -> Family {
    let one = Rational::one;
    Family {
        name: "goyt_sagan",
        citation: "Goyt-Sagan q-Fibonacci polynomials F^M_n(x, y, q)",
        params: vec![ParamSpec::free("x"), ParamSpec::free("y"), ParamSpec::base("q")],
        n_max: 12,
        build: Arc::new(|p, upto| goyt_sagan(p.get("x")?, p.get("y")?, p.get("q")?, upto)),
        identities: vec![
            ident(
                "sum",
                "Σ y/x^{k+1} q^{-C(k,2)-1} F_k = q^{-C(n+1,2)} F_{n+2}/x^{n+1} - 1",
                1,
                |c, k| {
                    let (x, y, q) = xyq(c)?;
                    Ok(div(y.clone(), x.pow(k + 1)?)? * q.pow(-binom2(k) - 1)? * c.x(k))
                },
                move |c, n| {
                    let (x, _, q) = xyq(c)?;
                    Ok(div(q.pow(-binom2(n + 1))? * c.x(n + 2), x.pow(n + 1)?)? - one())
                },
            ),
            ident(
                "even",
                "Σ x/y^k q^{-k²+3k-1} F_{2k} = q^{-n²+n} F_{2n+1}/y^n - 1",
                1,
                |c, k| {
                    let (x, y, q) = xyq(c)?;
                    Ok(div(x.clone(), y.pow(k)?)? * q.pow(-k * k + 3 * k - 1)? * c.x(2 * k))
                },
                move |c, n| {
                    let (_, y, q) = xyq(c)?;
                    Ok(div(q.pow(-n * n + n)? * c.x(2 * n + 1), y.pow(n)?)? - one())
                },
            ),
            ident(
                "odd",
                "Σ q^{-k²+2k} F_{2k+1}/y^k = q^{-n²} F_{2n+2}/(x y^n) - 1",
                1,
                |c, k| {
                    let (_, y, q) = xyq(c)?;
                    div(q.pow(-k * k + 2 * k)? * c.x(2 * k + 1), y.pow(k)?)
                },
                move |c, n| {
                    let (x, y, q) = xyq(c)?;
                    Ok(div(q.pow(-n * n)? * c.x(2 * n + 2), x * y.pow(n)?)? - one())
                },
            ),
            ident(
                "square",
                "Σ q^{-C(k,2)+k} F_{k+1}²/y^k = q^{-C(n,2)} F_{n+1}F_{n+2}/(x y^n) - 1",
                1,
                |c, k| {
                    let (_, y, q) = xyq(c)?;
                    div(q.pow(-binom2(k) + k)? * sq(c.x(k + 1)), y.pow(k)?)
                },
                move |c, n| {
                    let (x, y, q) = xyq(c)?;
                    Ok(div(q.pow(-binom2(n))? * c.x(n + 1) * c.x(n + 2), x * y.pow(n)?)? - one())
                },
            ),
            ident(
                "alternating",
                "Σ (-1)^k x^{k-1}/y^k F_{k+2} = (-1)^n (x/y)^n q^n F_{n+1} - 1",
                1,
                |c, k| {
                    let (x, y, _) = xyq(c)?;
                    div(sign(k) * x.pow(k - 1)? * c.x(k + 2), y.pow(k)?)
                },
                move |c, n| {
                    let (x, y, q) = xyq(c)?;
                    Ok(div(sign(n) * x.pow(n)? * q.pow(n)? * c.x(n + 1), y.pow(n)?)? - one())
                },
            ),
            ident(
                "divided",
                "Σ (xq/y)^{k-2} F_{k-1}/(-qx²/y;q)_k = 1 - x^{n-1}/y^n F_{n+2}/(-qx²/y;q)_n",
                1,
                |c, k| {
                    let (x, y, q) = xyq(c)?;
                    let base = -div(q * x * x, y.clone())?;
                    div(div(x * q, y.clone())?.pow(k - 2)? * c.x(k - 1), q_rising_factorial(&base, q, k))
                },
                move |c, n| {
                    let (x, y, q) = xyq(c)?;
                    let base = -div(q * x * x, y.clone())?;
                    let pre = div(x.pow(n - 1)?, y.pow(n)?)?;
                    Ok(one() - div(pre * c.x(n + 2), q_rising_factorial(&base, q, n))?)
                },
            ),
        ],
    }
}

fn goyt_mathisen_family() -> Family {
    let one = Rational::one;
    Family {
        name: "goyt_mathisen",
        citation: "Goyt-Mathisen q-Fibonacci polynomials F^I_n(x, y, q)",
        params: vec![ParamSpec::free("x"), ParamSpec::free("y"), ParamSpec::base("q")],
        n_max: 12,
        build: Arc::new(|p, upto| goyt_mathisen(p.get("x")?, p.get("y")?, p.get("q")?, upto)),
        identities: vec![
            ident(
                "alternating",
                "Σ (-1)^k x^{k-1}/y^k q^{-C(k,2)} F_{k+2} = (-1)^n (x/y)^n q^{-n(n-3)/2} F_{n+1} - 1",
                1,
                |c, k| {
                    let (x, y, q) = xyq(c)?;
                    div(sign(k) * x.pow(k - 1)? * q.pow(-binom2(k))? * c.x(k + 2), y.pow(k)?)
                },
                move |c, n| {
                    let (x, y, q) = xyq(c)?;
                    // n(n-3) is always even
                    let e = -(n * (n - 3)) / 2;
                    Ok(div(sign(n) * x.pow(n)? * q.pow(e)? * c.x(n + 1), y.pow(n)?)? - one())
                },
            ),
            ident(
                "divided",
                "Σ y²/x² (x/(qx²+y))^k q^{-(k-2)(k-5)/2} F_{k-1} = 1 - x^n/(x(qx²+y)^n) q^{-C(n,2)} F_{n+2}",
                1,
                |c, k| {
                    let (x, y, q) = xyq(c)?;
                    let pre = div(y * y, x * x)?;
                    let r = div(x.clone(), q * x * x + y)?;
                    Ok(pre * r.pow(k)? * q.pow(-((k - 2) * (k - 5)) / 2)? * c.x(k - 1))
                },
                move |c, n| {
                    let (x, y, q) = xyq(c)?;
                    let den = x * (q * x * x + y).pow(n)?;
                    Ok(one() - div(x.pow(n)? * q.pow(-binom2(n))? * c.x(n + 2), den)?)
                },
            ),
        ],
    }
}

/// Built-in families in listing order.
pub fn families() -> Vec<Family> {
    vec![
        fibonacci_family(),
        derangement_family(),
        pell_family(),
        schur_family(),
        q_pell_family(),
        goyt_sagan_family(),
        goyt_mathisen_family(),
    ]
}

pub fn family(name: &str) -> Option<Family> {
    families().into_iter().find(|f| f.name == name)
}

/// Both sides of one family identity at row `n`.
pub fn family_sides(fam: &Family, id: &FamilyIdentity, n: i64, p: &Params) -> Result<(Rational, Rational), EvalError> {
    let spec = (fam.build)(p, 2 * n + 2)?;
    let ctx = FamilyCtx { x: spec.generate((2 * n + 4) as usize)?, p };
    let mut lhs = Rational::zero();
    for k in id.lo..=n {
        lhs += (id.term)(&ctx, k)?;
    }
    Ok((lhs, (id.rhs)(&ctx, n)?))
}

/// One outcome per identity of `fam`, rows `0..=n_max`.
pub fn family_outcomes(fam: &Family, n_max: i64, p: &Params) -> Result<Vec<CheckOutcome>, EvalError> {
    let spec = (fam.build)(p, 2 * n_max + 2)?;
    let ctx = FamilyCtx { x: spec.generate((2 * n_max + 4) as usize)?, p };
    let mut out = Vec::new();
    for id in &fam.identities {
        let mut lhs = Rational::zero();
        let mut outcome = Ok(());
        for k in id.lo..0 {
            lhs += (id.term)(&ctx, k)?;
        }
        for n in 0..=n_max {
            if n >= id.lo {
                lhs += (id.term)(&ctx, n)?;
            }
            let rhs = (id.rhs)(&ctx, n)?;
            if outcome.is_ok() && lhs != rhs {
                outcome = Err(Mismatch::new(n, id.display).sides(lhs.clone(), rhs));
            }
        }
        out.push(outcome);
    }
    Ok(out)
}

pub fn family_sample(fam: &Family, n_max: i64, sample: u32, seed: u64) -> Vec<CheckRecord> {
    let checks: Vec<&str> = fam.identities.iter().map(|i| i.id).collect();
    let site = SampleSite { suite: "sequences", identity: fam.name, seed, sample, n_max };
    sampled_records(site, &checks, &fam.params, |p| family_outcomes(fam, n_max, p))
}

/// Parameter-free families are deterministic, so they run a single sample.
pub fn family_sample_count(fam: &Family, samples: u32) -> u32 {
    if fam.params.is_empty() {
        1
    } else {
        samples
    }
}

pub fn verify_family_suite(fam: &Family, n_max: i64, samples: u32, seed: u64) -> Report {
    let records = (0..family_sample_count(fam, samples)).flat_map(|s| family_sample(fam, n_max, s, seed)).collect();
    Report::new("sequences", seed, records)
}
