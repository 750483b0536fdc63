//! Exact verification of telescoping sums and terminating hypergeometric
//! identities.
//!
//! Everything is computed over [`arith::Rational`]; there is no floating
//! point anywhere. A zero denominator at a sample point surfaces as an
//! inadmissible-point error so sweeps can resample instead of failing.

pub mod arith;
pub mod corpus;
pub mod error;
pub mod exprlang;
pub mod ez;
pub mod genhyp;
pub mod params;
pub mod report;
pub mod sequences;
pub mod sweep;
pub mod telescope;

pub use arith::{ArithError, Rational};
pub use error::EvalError;
pub use params::{ParamKind, ParamSpec, Params};
pub use report::{CheckRecord, Report, Status, Witness};
pub use telescope::{SeqFn, TelescopeProblem};
