//! Seeded sample sweeps: draw an admissible point, run a group of checks on
//! it, and turn the outcome into report records.

use crate::arith::Rational;
use crate::error::EvalError;
use crate::params::{sample_rng, with_admissible_sample, Attempt, ParamSpec, Params, RETRY_BOUND};
use crate::report::{CheckRecord, Witness};

/// The first disagreement found by a check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub n: i64,
    pub lhs: Option<Rational>,
    pub rhs: Option<Rational>,
    pub detail: String,
    pub at: Vec<(String, String)>,
}

impl Mismatch {
    pub fn new(n: i64, detail: impl Into<String>) -> Self {
        Mismatch { n, lhs: None, rhs: None, detail: detail.into(), at: vec![("n".into(), n.to_string())] }
    }

    pub fn sides(mut self, lhs: Rational, rhs: Rational) -> Self {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self
    }

    pub fn at(mut self, name: &str, value: impl ToString) -> Self {
        self.at.push((name.to_string(), value.to_string()));
        self
    }

    pub fn witness(&self, params: &Params) -> Witness {
        let mut w = Witness::new(params, self.detail.clone());
        for (k, v) in &self.at {
            w = w.at(k, v);
        }
        w.lhs = self.lhs.clone();
        w.rhs = self.rhs.clone();
        w
    }
}

/// Per-check result on one admissible sample: `Ok(())` or the first mismatch.
pub type CheckOutcome = Result<(), Mismatch>;

/// Location of one sample in a sweep.
#[derive(Debug, Clone, Copy)]
pub struct SampleSite<'a> {
    pub suite: &'a str,
    pub identity: &'a str,
    pub seed: u64,
    pub sample: u32,
    pub n_max: i64,
}

/// Runs `body` on the first admissible sample and emits one record per name
/// in `checks`. `body` must return outcomes in the same order.
pub fn sampled_records(
    site: SampleSite<'_>,
    checks: &[&str],
    specs: &[ParamSpec],
    body: impl FnMut(&Params) -> Result<Vec<CheckOutcome>, EvalError>,
) -> Vec<CheckRecord> {
    let SampleSite { suite, identity, seed, sample, n_max } = site;
    let mut rng = sample_rng(seed, identity, sample);
    match with_admissible_sample(specs, n_max, &mut rng, body) {
        Attempt::Done { value, params, .. } => {
            debug_assert_eq!(value.len(), checks.len());
            checks
                .iter()
                .zip(value)
                .map(|(check, outcome)| match outcome {
                    Ok(()) => CheckRecord::pass(suite, identity, check, sample, n_max),
                    Err(m) => CheckRecord::fail(suite, identity, check, sample, m.n, m.witness(&params)),
                })
                .collect()
        }
        Attempt::Error { error, params } => checks
            .iter()
            .map(|check| CheckRecord::fail(suite, identity, check, sample, 0, Witness::new(&params, error.to_string())))
            .collect(),
        Attempt::Exhausted => checks
            .iter()
            .map(|check| {
                let detail = format!("sample exhausted: no admissible point in {RETRY_BOUND} draws");
                CheckRecord::fail(suite, identity, check, sample, 0, Witness::new(&Params::new(), detail))
            })
            .collect(),
    }
}
