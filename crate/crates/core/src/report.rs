//! Structured verification outcomes shared by every suite.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;

use crate::arith::Rational;
use crate::error::EvalError;
use crate::params::Params;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inadmissible,
}

/// Concrete evidence attached to a non-passing record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Rational>,
    pub detail: String,
}

impl Witness {
    pub fn new(params: &Params, detail: impl Into<String>) -> Self {
        Witness { inputs: params.describe(), lhs: None, rhs: None, detail: detail.into() }
    }

    pub fn at(mut self, name: &str, value: impl ToString) -> Self {
        self.inputs.insert(name.to_string(), value.to_string());
        self
    }

    pub fn sides(mut self, lhs: Rational, rhs: Rational) -> Self {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self
    }
}

/// One check of one identity on one sample. On success `n` is the largest
/// row verified; on failure it is the first failing row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub identity: String,
    pub check: String,
    pub sample: u32,
    pub n: i64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CheckRecord {
    pub fn pass(suite: &str, identity: &str, check: &str, sample: u32, n: i64) -> Self {
        CheckRecord {
            suite: suite.to_string(),
            identity: identity.to_string(),
            check: check.to_string(),
            sample,
            n,
            status: Status::Pass,
            witness: None,
        }
    }

    pub fn fail(suite: &str, identity: &str, check: &str, sample: u32, n: i64, witness: Witness) -> Self {
        CheckRecord { status: Status::Fail, witness: Some(witness), ..Self::pass(suite, identity, check, sample, n) }
    }

    pub fn inadmissible(suite: &str, identity: &str, check: &str, sample: u32, n: i64, witness: Witness) -> Self {
        CheckRecord { status: Status::Inadmissible, witness: Some(witness), ..Self::pass(suite, identity, check, sample, n) }
    }

    /// Maps an evaluation error to a record: zero denominators become
    /// `Inadmissible`, anything else a failure.
    pub fn from_error(suite: &str, identity: &str, check: &str, sample: u32, n: i64, params: &Params, e: &EvalError) -> Self {
        let w = Witness::new(params, e.to_string());
        if e.is_inadmissible() {
            Self::inadmissible(suite, identity, check, sample, n, w)
        } else {
            Self::fail(suite, identity, check, sample, n, w)
        }
    }

    fn sort_key(&self) -> (&str, &str, &str, u32, i64) {
        (&self.suite, &self.identity, &self.check, self.sample, self.n)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub pass: usize,
    pub fail: usize,
    pub inadmissible: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub flags: BTreeMap<String, String>,
    pub totals: Totals,
    pub records: Vec<CheckRecord>,
    /// Kept out of JSON so reports are byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Report {
    pub fn new(suite: &str, seed: u64, records: Vec<CheckRecord>) -> Self {
        let mut r = Report {
            schema: SCHEMA_VERSION,
            suite: suite.to_string(),
            seed,
            flags: BTreeMap::new(),
            totals: Totals::default(),
            records,
            wall_time: Duration::ZERO,
        };
        r.normalize();
        r
    }

    /// Sorts records by their stable key and recomputes totals.
    pub fn normalize(&mut self) {
        self.records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut t = Totals::default();
        for rec in &self.records {
            match rec.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Inadmissible => t.inadmissible += 1,
            }
        }
        self.totals = t;
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
        self.wall_time += other.wall_time;
        self.normalize();
    }

    /// True when nothing failed. Inadmissible records do not count as failures.
    pub fn all_pass(&self) -> bool {
        self.totals.fail == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.failures().next()
    }
}
