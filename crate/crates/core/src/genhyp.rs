//! Summations whose parameters are arbitrary sequences.
//!
//! Each identity is the telescoping lemma applied to an elementary
//! polynomial identity `U - V = W` with the letters replaced by sequence
//! entries. Sums are built from the printed `U`, `V`, `W`, never from `U - V`.

use thiserror::Error;

use crate::arith::{ArithError, Rational};
use crate::error::EvalError;
use crate::params::{ParamSpec, Params};
use crate::report::{CheckRecord, Report};
use crate::sweep::{sampled_records, CheckOutcome, Mismatch, SampleSite};
use crate::telescope::SeqFn;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenhypError {
    #[error("{factor} vanishes at index {index}")]
    Inadmissible { index: i64, factor: &'static str },
    #[error("sequence `{0}` is required")]
    Missing(&'static str),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl From<GenhypError> for EvalError {
    fn from(e: GenhypError) -> Self {
        match e {
            GenhypError::Inadmissible { .. } => ArithError::DivisionByZero.into(),
            GenhypError::Missing(name) => EvalError::UnboundVariable(name.to_string()),
            GenhypError::Eval(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceParams {
    pub a: SeqFn,
    pub b: SeqFn,
    pub c: Option<SeqFn>,
    pub d: Option<SeqFn>,
}

impl SequenceParams {
    pub fn new(a: SeqFn, b: SeqFn) -> Self {
        SequenceParams { a, b, c: None, d: None }
    }

    pub fn with_c(mut self, c: SeqFn) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_d(mut self, d: SeqFn) -> Self {
        self.d = Some(d);
        self
    }

    fn c(&self) -> Result<&SeqFn, GenhypError> {
        self.c.as_ref().ok_or(GenhypError::Missing("c"))
    }

    fn d(&self) -> Result<&SeqFn, GenhypError> {
        self.d.as_ref().ok_or(GenhypError::Missing("d"))
    }

    /// `a_k ↦ a_k/b_k`, `b_k ↦ 1/b_k`, which carries the permuted
    /// Chu-Vandermonde form onto the unpermuted one.
    pub fn relabeled(&self) -> Result<SequenceParams, GenhypError> {
        let (lo, hi) = (self.b.lo(), self.b.hi());
        let recip = |k: i64| -> Result<Rational, GenhypError> {
            self.b.get(k)?.recip().map_err(|_| GenhypError::Inadmissible { index: k, factor: "b_k" })
        };
        let a = SeqFn::from_fn(lo, hi, |k| Ok::<_, GenhypError>(self.a.get(k)? * recip(k)?))?;
        let b = SeqFn::from_fn(lo, hi, recip)?;
        Ok(SequenceParams { a, b, c: self.c.clone(), d: self.d.clone() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Macdonald {
    /// `u = (1-b)a`, `v = (1-a)b`, `w = a - b`.
    Cv,
    /// `u = (1-b)a`, `v = a - b`, `w = (1-a)b`.
    CvPermuted,
    /// `u = (1-b)(1-c)a`, `v = (1-a)(a-bc)`, `w = (a-b)(a-c)`.
    Ps,
    /// `u = (1-b)(1-c)(1-d)(a²-bcd)a`, `v = (1-a)(a-bc)(a-bd)(a-cd)`,
    /// `w = (a-b)(a-c)(a-d)(a-bcd)`.
    Dougall,
}

impl Macdonald {
    pub const ALL: [Macdonald; 4] = [Macdonald::Cv, Macdonald::CvPermuted, Macdonald::Ps, Macdonald::Dougall];

    pub fn id(self) -> &'static str {
        match self {
            Macdonald::Cv => "cv",
            Macdonald::CvPermuted => "cv_permuted",
            Macdonald::Ps => "ps",
            Macdonald::Dougall => "dougall",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            Macdonald::Cv => "sequence Chu-Vandermonde, extending Ramanujan's sum",
            Macdonald::CvPermuted => "sequence Chu-Vandermonde with (u, w, v) roles",
            Macdonald::Ps => "Macdonald's sequence Pfaff-Saalschutz sum",
            Macdonald::Dougall => "Macdonald's sequence Dougall sum",
        }
    }

    /// `(U_k, V_k, W_k)` at index `k`.
    pub fn factors(self, p: &SequenceParams, k: i64) -> Result<[Rational; 3], GenhypError> {
        let one = Rational::one();
        let a = p.a.get(k)?;
        let b = p.b.get(k)?;
        Ok(match self {
            Macdonald::Cv => [(&one - b) * a, (&one - a) * b, a - b],
            Macdonald::CvPermuted => [(&one - b) * a, a - b, (&one - a) * b],
            Macdonald::Ps => {
                let c = p.c()?.get(k)?;
                [(&one - b) * (&one - c) * a, (&one - a) * (a - b * c), (a - b) * (a - c)]
            }
            Macdonald::Dougall => {
                let c = p.c()?.get(k)?;
                let d = p.d()?.get(k)?;
                let bcd = b * c * d;
                [
                    (&one - b) * (&one - c) * (&one - d) * (a * a - &bcd) * a,
                    (&one - a) * (a - b * c) * (a - b * d) * (a - c * d),
                    (a - b) * (a - c) * (a - d) * (a - &bcd),
                ]
            }
        })
    }
}

fn div(a: &Rational, b: &Rational) -> Result<Rational, GenhypError> {
    Ok(a.checked_div(b).map_err(EvalError::from)?)
}

struct Table {
    u: Vec<Rational>,
    v: Vec<Rational>,
    w: Vec<Rational>,
}

fn table(kind: Macdonald, p: &SequenceParams, n: i64) -> Result<Table, GenhypError> {
    let mut t = Table { u: Vec::new(), v: Vec::new(), w: Vec::new() };
    for k in 0..=n {
        let [u, v, w] = kind.factors(p, k)?;
        let nonzero = |x: &Rational, factor| if x.is_zero() { Err(GenhypError::Inadmissible { index: k, factor }) } else { Ok(()) };
        if k == 0 {
            nonzero(&u, "u_0")?;
            nonzero(&w, "w_0")?;
        } else {
            nonzero(&v, "v_k")?;
        }
        t.u.push(u);
        t.v.push(v);
        t.w.push(w);
    }
    Ok(t)
}

/// `(w_k/w_0) ∏_{j<k} u_j / ∏_{1≤j≤k} v_j` for `k = 0..=n`.
pub fn macdonald_terms(kind: Macdonald, p: &SequenceParams, n: i64) -> Result<Vec<Rational>, GenhypError> {
    let t = table(kind, p, n)?;
    let mut out = Vec::new();
    let mut ratio = Rational::one();
    for k in 0..=n as usize {
        if k > 0 {
            ratio = div(&(ratio * &t.u[k - 1]), &t.v[k])?;
        }
        out.push(div(&t.w[k], &t.w[0])? * &ratio);
    }
    Ok(out)
}

/// `(u_0/w_0)(∏_{1≤j≤n} u_j/v_j - v_0/u_0)`.
pub fn macdonald_rhs(kind: Macdonald, p: &SequenceParams, n: i64) -> Result<Rational, GenhypError> {
    let t = table(kind, p, n)?;
    let mut prod = Rational::one();
    for j in 1..=n as usize {
        prod *= div(&t.u[j], &t.v[j])?;
    }
    Ok(div(&t.u[0], &t.w[0])? * (prod - div(&t.v[0], &t.u[0])?))
}

pub fn macdonald_sides(kind: Macdonald, p: &SequenceParams, n: i64) -> Result<(Rational, Rational), GenhypError> {
    Ok((macdonald_terms(kind, p, n)?.into_iter().sum(), macdonald_rhs(kind, p, n)?))
}

pub fn macdonald_cv(p: &SequenceParams, n: i64) -> Result<(Rational, Rational), GenhypError> {
    macdonald_sides(Macdonald::Cv, p, n)
}

pub fn macdonald_cv_permuted(p: &SequenceParams, n: i64) -> Result<(Rational, Rational), GenhypError> {
    macdonald_sides(Macdonald::CvPermuted, p, n)
}

pub fn macdonald_ps(p: &SequenceParams, n: i64) -> Result<(Rational, Rational), GenhypError> {
    macdonald_sides(Macdonald::Ps, p, n)
}

pub fn macdonald_dougall(p: &SequenceParams, n: i64) -> Result<(Rational, Rational), GenhypError> {
    macdonald_sides(Macdonald::Dougall, p, n)
}

/// Permuted form at `p` against the unpermuted form at the relabeled point,
/// term by term and for the closed form.
pub fn relabeling_law(p: &SequenceParams, n: i64) -> Result<Result<(), Mismatch>, GenhypError> {
    let q = p.relabeled()?;
    let direct = macdonald_terms(Macdonald::CvPermuted, p, n)?;
    let routed = macdonald_terms(Macdonald::Cv, &q, n)?;
    for (k, (x, y)) in direct.into_iter().zip(routed).enumerate() {
        if x != y {
            return Ok(Err(Mismatch::new(n, "term differs after relabeling").at("k", k).sides(x, y)));
        }
    }
    let (x, y) = (macdonald_rhs(Macdonald::CvPermuted, p, n)?, macdonald_rhs(Macdonald::Cv, &q, n)?);
    Ok(if x == y { Ok(()) } else { Err(Mismatch::new(n, "closed form differs after relabeling").sides(x, y)) })
}

/// Dougall form with `d ≡ 0` against the Pfaff-Saalschutz form, termwise.
pub fn d_zero_law(p: &SequenceParams, n: i64) -> Result<Result<(), Mismatch>, GenhypError> {
    let zero = SeqFn::constant(Rational::zero(), p.a.lo(), p.a.hi());
    let with_zero = p.clone().with_d(zero);
    let doug = macdonald_terms(Macdonald::Dougall, &with_zero, n)?;
    let ps = macdonald_terms(Macdonald::Ps, p, n)?;
    for (k, (x, y)) in doug.into_iter().zip(ps).enumerate() {
        if x != y {
            return Ok(Err(Mismatch::new(n, "d = 0 term differs from the three-sequence sum").at("k", k).sides(x, y)));
        }
    }
    let (x, y) = (macdonald_rhs(Macdonald::Dougall, &with_zero, n)?, macdonald_rhs(Macdonald::Ps, p, n)?);
    Ok(if x == y { Ok(()) } else { Err(Mismatch::new(n, "d = 0 closed form differs").sides(x, y)) })
}

fn sequence_specs(kind: Macdonald) -> Vec<ParamSpec> {
    let names: &[&str] = match kind {
        Macdonald::Cv | Macdonald::CvPermuted => &["a", "b"],
        Macdonald::Ps => &["a", "b", "c"],
        Macdonald::Dougall => &["a", "b", "c", "d"],
    };
    names.iter().map(|n| ParamSpec::sequence(n, 0, 0)).collect()
}

fn sequence_params(p: &Params) -> Result<SequenceParams, EvalError> {
    Ok(SequenceParams {
        a: p.seq("a")?.clone(),
        b: p.seq("b")?.clone(),
        c: p.sequences.get("c").cloned(),
        d: p.sequences.get("d").cloned(),
    })
}

/// Checks run for each identity of the sweep.
pub fn checks_for(kind: Macdonald) -> &'static [&'static str] {
    match kind {
        Macdonald::CvPermuted => &["identity", "relabeling"],
        Macdonald::Ps => &["identity", "d_zero"],
        _ => &["identity"],
    }
}

/// Every check of `kind` for rows `0..=n_max` at one point. Zero
/// denominators anywhere in the range reject the point.
pub fn genhyp_outcomes(kind: Macdonald, n_max: i64, p: &SequenceParams) -> Result<Vec<CheckOutcome>, EvalError> {
    let mut identity = Ok(());
    let mut law = Ok(());
    let terms = macdonald_terms(kind, p, n_max)?;
    for n in 0..=n_max {
        let lhs: Rational = terms[..=n as usize].iter().cloned().sum();
        let rhs = macdonald_rhs(kind, p, n)?;
        if identity.is_ok() && lhs != rhs {
            identity = Err(Mismatch::new(n, "sum differs from closed form").sides(lhs, rhs));
        }
        if law.is_ok() {
            law = match kind {
                Macdonald::CvPermuted => relabeling_law(p, n)?,
                Macdonald::Ps => d_zero_law(p, n)?,
                _ => Ok(()),
            };
        }
    }
    let mut out = vec![identity];
    if checks_for(kind).len() > 1 {
        out.push(law);
    }
    Ok(out)
}

pub fn genhyp_sample(kind: Macdonald, n_max: i64, sample: u32, seed: u64) -> Vec<CheckRecord> {
    let site = SampleSite { suite: "genhyp", identity: kind.id(), seed, sample, n_max };
    sampled_records(site, checks_for(kind), &sequence_specs(kind), |p| genhyp_outcomes(kind, n_max, &sequence_params(p)?))
}

pub fn verify_genhyp(kind: Macdonald, n_max: i64, samples: u32, seed: u64) -> Report {
    let records = (0..samples).flat_map(|s| genhyp_sample(kind, n_max, s, seed)).collect();
    Report::new("genhyp", seed, records)
}
