//! Parameter assignments and the seeded admissible-point sampler.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Rational;
use crate::error::EvalError;
use crate::telescope::SeqFn;

/// Numerators and denominators of sampled rationals are drawn from `1..=SAMPLE_BOUND`.
pub const SAMPLE_BOUND: i64 = 64;

/// Attempts per sample before a sweep gives up on finding an admissible point.
pub const RETRY_BOUND: u32 = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamKind {
    /// Nonzero rational.
    Free,
    /// A q-base: nonzero, not ±1, and no `q^m = 1` for small `m`.
    Base,
    /// Integer drawn uniformly from `min..=max`.
    Natural { min: i64, max: i64 },
    /// Free rationals on `lo..=n_max + extra`.
    Sequence { lo: i64, extra: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    pub note: String,
}

impl ParamSpec {
    pub fn new(name: &str, kind: ParamKind, note: &str) -> Self {
        ParamSpec { name: name.to_string(), kind, note: note.to_string() }
    }

    pub fn free(name: &str) -> Self {
        Self::new(name, ParamKind::Free, "nonzero rational")
    }

    pub fn base(name: &str) -> Self {
        Self::new(name, ParamKind::Base, "q-base, not a root of unity")
    }

    pub fn natural(name: &str, min: i64, max: i64) -> Self {
        Self::new(name, ParamKind::Natural { min, max }, "integer")
    }

    pub fn sequence(name: &str, lo: i64, extra: i64) -> Self {
        Self::new(name, ParamKind::Sequence { lo, extra }, "rational sequence")
    }
}

/// A full parameter assignment: scalars and tabulated sequences by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    pub scalars: BTreeMap<String, Rational>,
    pub sequences: BTreeMap<String, SeqFn>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: impl Into<Rational>) -> Self {
        self.scalars.insert(name.to_string(), value.into());
        self
    }

    pub fn with_seq(mut self, name: &str, seq: SeqFn) -> Self {
        self.sequences.insert(name.to_string(), seq);
        self
    }

    pub fn set(&mut self, name: &str, value: Rational) {
        self.scalars.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Result<&Rational, EvalError> {
        self.scalars.get(name).ok_or_else(|| EvalError::UnboundVariable(name.to_string()))
    }

    pub fn seq(&self, name: &str) -> Result<&SeqFn, EvalError> {
        self.sequences.get(name).ok_or_else(|| EvalError::UnboundVariable(name.to_string()))
    }

    /// An integer-valued scalar.
    pub fn int(&self, name: &str) -> Result<i64, EvalError> {
        let v = self.get(name)?;
        v.to_i64().ok_or_else(|| EvalError::InvalidArgument { func: "int", value: v.to_string() })
    }

    /// Rendered form for report witnesses. Sequences are listed elementwise.
    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, String> =
            self.scalars.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
        for (name, s) in &self.sequences {
            let vals: Vec<String> = s.values().iter().map(|v| v.to_string()).collect();
            out.insert(name.clone(), format!("[{}..={}] {}", s.lo(), s.hi(), vals.join(", ")));
        }
        out
    }
}

/// Deterministic per-sample generator: the stream depends only on
/// `(seed, key, sample)`, never on scheduling.
pub fn sample_rng(seed: u64, key: &str, sample: u32) -> ChaCha8Rng {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for byte in seed.to_le_bytes().iter().chain(key.as_bytes()).chain(&sample.to_le_bytes()) {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(PRIME);
    }
    ChaCha8Rng::seed_from_u64(h)
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    let num = rng.gen_range(1..=SAMPLE_BOUND) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let den = rng.gen_range(1..=SAMPLE_BOUND);
    Rational::new(num, den).expect("positive denominator")
}

/// A base `q` with `q ≠ 0` and `q^m ≠ 1` for `1 ≤ m ≤ max_order`.
pub fn random_base(rng: &mut impl Rng, max_order: i64) -> Rational {
    loop {
        let q = random_rational(rng);
        let mut power = Rational::one();
        let mut ok = true;
        for _ in 1..=max_order.max(2) {
            power *= &q;
            if power.is_one() {
                ok = false;
                break;
            }
        }
        if ok {
            return q;
        }
    }
}

pub fn sample_params(specs: &[ParamSpec], n_max: i64, rng: &mut impl Rng) -> Params {
    let mut p = Params::new();
    for spec in specs {
        match &spec.kind {
            ParamKind::Free => p.set(&spec.name, random_rational(rng)),
            ParamKind::Base => p.set(&spec.name, random_base(rng, n_max + 2)),
            ParamKind::Natural { min, max } => p.set(&spec.name, Rational::from(rng.gen_range(*min..=*max))),
            ParamKind::Sequence { lo, extra } => {
                let seq = SeqFn::from_fn_total(*lo, n_max + extra, |_| random_rational(rng));
                p.sequences.insert(spec.name.clone(), seq);
            }
        }
    }
    p
}

/// Outcome of searching for an admissible sample.
#[derive(Debug)]
pub enum Attempt<T> {
    /// `attempts` counts the rejected draws before success.
    Done { value: T, params: Params, rejected: u32 },
    /// A non-admissibility error, e.g. an unbound variable in a user config.
    Error { error: EvalError, params: Params },
    Exhausted,
}

/// Draws parameter points until `body` evaluates without a zero denominator.
pub fn with_admissible_sample<T>(
    specs: &[ParamSpec],
    n_max: i64,
    rng: &mut impl Rng,
    mut body: impl FnMut(&Params) -> Result<T, EvalError>,
) -> Attempt<T> {
    for rejected in 0..RETRY_BOUND {
        let params = sample_params(specs, n_max, rng);
        match body(&params) {
            Ok(value) => return Attempt::Done { value, params, rejected },
            Err(e) if e.is_inadmissible() => continue,
            Err(error) => return Attempt::Error { error, params },
        }
    }
    Attempt::Exhausted
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rng_is_keyed() {
        let a: u64 = sample_rng(1, "x", 0).gen();
        let b: u64 = sample_rng(1, "x", 0).gen();
        let c: u64 = sample_rng(1, "x", 1).gen();
        let d: u64 = sample_rng(1, "y", 0).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn sampled_values_respect_bounds() {
        let mut rng = sample_rng(5, "bounds", 0);
        let bound = Rational::from(SAMPLE_BOUND);
        for _ in 0..2000 {
            let x = random_rational(&mut rng);
            assert!(!x.is_zero());
            assert!(x.numer().magnitude() <= bound.numer().magnitude());
            assert!(x.denom() <= bound.numer());
            let q = random_base(&mut rng, 14);
            assert!(!q.abs().is_one());
        }
    }

    #[test]
    fn retry_bound_is_enforced() {
        let mut rng = sample_rng(0, "never", 0);
        let mut calls = 0;
        let out: Attempt<()> = with_admissible_sample(&[ParamSpec::free("x")], 3, &mut rng, |_| {
            calls += 1;
            Err(EvalError::Arith(crate::arith::ArithError::DivisionByZero))
        });
        assert!(matches!(out, Attempt::Exhausted));
        assert_eq!(calls, RETRY_BOUND);
    }

    #[test]
    fn sequence_params_cover_requested_domain() {
        let mut rng = sample_rng(0, "seq", 0);
        let p = sample_params(&[ParamSpec::sequence("a", 1, 1)], 6, &mut rng);
        let a = p.seq("a").unwrap();
        assert_eq!((a.lo(), a.hi()), (1, 7));
    }
}
