//! Line-oriented identity definitions (`.tkid` files).
//!
//! ```text
//! # comments run to end of line
//! name: binomial
//! params: x, q:base, m:nat(0..6)
//! lhs: (-1)^k * rf(-n, k) * x^k / rf(1, k)
//! range: 0 .. n
//! rhs: (1 + x)^n
//! cert_u: x*(n - k + 1)
//! cert_v: k
//! ```
//!
//! A line that starts with whitespace continues the previous section.
//! Optional sections: `citation`, `cert_u`/`cert_v` (both or neither),
//! `nonzero` (repeatable; each expression in `n` and the parameters must be
//! nonzero at an admissible point), `n_max`, and `terminating: yes|no`.
//!
//! The recurrence form replaces `lhs`/`range`/`rhs` with `rec_a`, `rec_b`
//! (coefficients in `n`), `x0` and `x1`, and is checked against the six
//! generalized recurrence identities.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use super::parser::{parse_at, SyntaxError};
use super::{eval_with, Expr, Lookup};
use crate::arith::{ArithError, Rational};
use crate::corpus::{Certificate, IdentityDef, RowFn};
use crate::error::EvalError;
use crate::params::{ParamKind, ParamSpec, Params};
use crate::sequences::RecurrenceSpec;
use crate::telescope::SeqFn;

const DEFAULT_N_MAX: i64 = 10;
const RESERVED: [&str; 3] = ["n", "k", "j"];
const SECTIONS: [&str; 15] = [
    "name", "citation", "params", "lhs", "range", "rhs", "cert_u", "cert_v", "nonzero", "n_max", "terminating",
    "rec_a", "rec_b", "x0", "x1",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("syntax error in `{section}` at {error}")]
    Syntax { section: String, error: SyntaxError },
    #[error("schema error: {0}")]
    Schema(String),
}

fn schema(msg: impl Into<String>) -> ConfigError {
    ConfigError::Schema(msg.into())
}

/// A custom three-term recurrence with symbolic coefficients.
#[derive(Debug, Clone)]
pub struct RecurrenceConfig {
    pub name: String,
    pub params: Vec<ParamSpec>,
    pub n_max: i64,
    pub a: Expr,
    pub b: Expr,
    pub x0: Expr,
    pub x1: Expr,
}

impl RecurrenceConfig {
    /// Tabulates the coefficients on `0..=upto` at a parameter point.
    pub fn spec(&self, p: &Params, upto: i64) -> Result<RecurrenceSpec, EvalError> {
        let a = SeqFn::from_fn(0, upto, |n| eval_with(&self.a, &RowEnv::new(p, n, None)))?;
        let b = SeqFn::from_fn(0, upto, |n| eval_with(&self.b, &RowEnv::new(p, n, None)))?;
        Ok(RecurrenceSpec::new(&self.name, a, b, eval_with(&self.x0, p)?, eval_with(&self.x1, p)?))
    }
}

#[derive(Debug, Clone)]
pub enum LoadedConfig {
    Identity(IdentityDef),
    Recurrence(RecurrenceConfig),
}

/// Parameters plus the row index `n` and, for summands, the term index `k`.
struct RowEnv<'a> {
    p: &'a Params,
    n: Rational,
    k: Option<Rational>,
}

impl<'a> RowEnv<'a> {
    fn new(p: &'a Params, n: i64, k: Option<i64>) -> Self {
        RowEnv { p, n: Rational::from(n), k: k.map(Rational::from) }
    }
}

impl Lookup for RowEnv<'_> {
    fn lookup(&self, name: &str) -> Option<&Rational> {
        match name {
            "n" => Some(&self.n),
            "k" => self.k.as_ref(),
            _ => self.p.lookup(name),
        }
    }
}

struct Section {
    key: String,
    /// Value text padded so that parse positions match the file.
    text: String,
    line: usize,
}

fn split_sections(src: &str) -> Result<Vec<Section>, ConfigError> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = match raw.find('#') {
            Some(c) => &raw[..c],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with(char::is_whitespace) {
            let last = out.last_mut().ok_or_else(|| schema(format!("line {}: continuation before any section", i + 1)))?;
            let missing = i - (last.line - 1) - last.text.matches('\n').count();
            last.text.push_str(&"\n".repeat(missing));
            last.text.push_str(line);
            continue;
        }
        let colon = line.find(':').ok_or_else(|| schema(format!("line {}: expected `section: value`", i + 1)))?;
        let key = line[..colon].trim().to_string();
        if !SECTIONS.contains(&key.as_str()) {
            return Err(schema(format!("line {}: unknown section `{key}`", i + 1)));
        }
        if key != "nonzero" && out.iter().any(|s| s.key == key) {
            return Err(schema(format!("line {}: duplicate section `{key}`", i + 1)));
        }
        let text = format!("{}{}", " ".repeat(colon + 1), &line[colon + 1..]);
        out.push(Section { key, text, line: i + 1 });
    }
    Ok(out)
}

fn parse_params(text: &str) -> Result<Vec<ParamSpec>, ConfigError> {
    let mut out: Vec<ParamSpec> = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, kind) = match item.split_once(':') {
            Some((n, k)) => (n.trim(), k.trim()),
            None => (item, "free"),
        };
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(schema(format!("invalid parameter name `{name}`")));
        }
        if RESERVED.contains(&name) {
            return Err(schema(format!("parameter name `{name}` is reserved")));
        }
        if out.iter().any(|p| p.name == name) {
            return Err(schema(format!("parameter `{name}` declared twice")));
        }
        let kind = match kind {
            "free" => ParamKind::Free,
            "base" => ParamKind::Base,
            k if k.starts_with("nat(") && k.ends_with(')') => {
                let (lo, hi) = k[4..k.len() - 1]
                    .split_once("..")
                    .ok_or_else(|| schema(format!("expected nat(LO..HI), got `{k}`")))?;
                let lo: i64 = lo.trim().parse().map_err(|_| schema(format!("bad bound in `{k}`")))?;
                let hi: i64 = hi.trim().parse().map_err(|_| schema(format!("bad bound in `{k}`")))?;
                if lo > hi {
                    return Err(schema(format!("empty range in `{k}`")));
                }
                ParamKind::Natural { min: lo, max: hi }
            }
            other => return Err(schema(format!("unknown parameter kind `{other}`"))),
        };
        out.push(ParamSpec::new(name, kind, "from config"));
    }
    Ok(out)
}

struct Sections {
    items: Vec<Section>,
}

impl Sections {
    fn raw(&self, key: &str) -> Option<&Section> {
        self.items.iter().find(|s| s.key == key)
    }

    fn required(&self, key: &str) -> Result<&Section, ConfigError> {
        self.raw(key).ok_or_else(|| schema(format!("missing required section `{key}`")))
    }

    fn expr(s: &Section, allowed: &BTreeSet<String>) -> Result<Expr, ConfigError> {
        let e = parse_at(&s.text, s.line - 1).map_err(|error| ConfigError::Syntax { section: s.key.clone(), error })?;
        if let Some(v) = e.free_vars().into_iter().find(|v| !allowed.contains(v)) {
            return Err(schema(format!("unbound variable `{v}` in `{}` (line {})", s.key, s.line)));
        }
        Ok(e)
    }

    fn expr_in(&self, key: &str, allowed: &BTreeSet<String>) -> Result<Expr, ConfigError> {
        Self::expr(self.required(key)?, allowed)
    }
}

fn scope(params: &[ParamSpec], extra: &[&str]) -> BTreeSet<String> {
    params.iter().map(|p| p.name.clone()).chain(extra.iter().map(|s| s.to_string())).collect()
}

fn row_fn(e: Expr) -> RowFn {
    Arc::new(move |n, p| eval_with(&e, &RowEnv::new(p, n, None)))
}

fn term_fn(e: Expr) -> crate::corpus::TermFn {
    Arc::new(move |n, k, p| eval_with(&e, &RowEnv::new(p, n, Some(k))))
}

fn integer(v: Rational, what: &str) -> Result<i64, EvalError> {
    v.to_i64()
        .filter(|_| v.is_integer())
        .ok_or_else(|| EvalError::InvalidArgument { func: "range", value: format!("{what} = {v}") })
}

/// Parses a config from text.
pub fn parse_config(src: &str) -> Result<LoadedConfig, ConfigError> {
    let secs = Sections { items: split_sections(src)? };
    let name = secs.required("name")?.text.trim().to_string();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(schema("`name` must be a single non-empty word"));
    }
    let params = match secs.raw("params") {
        Some(s) => parse_params(&s.text)?,
        None => Vec::new(),
    };
    let n_max = match secs.raw("n_max") {
        Some(s) => {
            let v: i64 = s.text.trim().parse().map_err(|_| schema("`n_max` must be a non-negative integer"))?;
            if v < 0 {
                return Err(schema("`n_max` must be a non-negative integer"));
            }
            v
        }
        None => DEFAULT_N_MAX,
    };
    let rec_keys = ["rec_a", "rec_b", "x0", "x1"];
    let sum_keys = ["lhs", "range", "rhs", "cert_u", "cert_v", "terminating", "nonzero"];
    let is_rec = rec_keys.iter().any(|k| secs.raw(k).is_some());
    if is_rec {
        if let Some(k) = sum_keys.iter().find(|k| secs.raw(k).is_some()) {
            return Err(schema(format!("section `{k}` cannot be combined with a recurrence definition")));
        }
        let row = scope(&params, &["n"]);
        let fixed = scope(&params, &[]);
        return Ok(LoadedConfig::Recurrence(RecurrenceConfig {
            name,
            n_max,
            a: secs.expr_in("rec_a", &row)?,
            b: secs.expr_in("rec_b", &row)?,
            x0: secs.expr_in("x0", &fixed)?,
            x1: secs.expr_in("x1", &fixed)?,
            params,
        }));
    }

    let term_scope = scope(&params, &["n", "k"]);
    let row_scope = scope(&params, &["n"]);
    let lhs = secs.expr_in("lhs", &term_scope)?;
    let rhs = secs.expr_in("rhs", &row_scope)?;
    let range_sec = secs.required("range")?;
    let (lo_text, hi_text) =
        range_sec.text.split_once("..").ok_or_else(|| schema(format!("`range` must read `LO .. HI` (line {})", range_sec.line)))?;
    let pad = " ".repeat(lo_text.len() + 2);
    let lo = Sections::expr(&Section { key: "range".into(), text: lo_text.to_string(), line: range_sec.line }, &row_scope)?;
    let hi = Sections::expr(&Section { key: "range".into(), text: format!("{pad}{hi_text}"), line: range_sec.line }, &row_scope)?;
    let certificate = match (secs.raw("cert_u"), secs.raw("cert_v")) {
        (None, None) => None,
        (Some(u), Some(v)) => Some(Certificate {
            u: term_fn(Sections::expr(u, &term_scope)?),
            v: term_fn(Sections::expr(v, &term_scope)?),
        }),
        _ => return Err(schema("`cert_u` and `cert_v` must be given together")),
    };
    let guards = secs
        .items
        .iter()
        .filter(|s| s.key == "nonzero")
        .map(|s| Sections::expr(s, &row_scope))
        .collect::<Result<Vec<_>, _>>()?;
    let terminating = match secs.raw("terminating").map(|s| s.text.trim()) {
        None | Some("no") => false,
        Some("yes") => true,
        Some(other) => return Err(schema(format!("`terminating` must be yes or no, got `{other}`"))),
    };
    let citation = secs.raw("citation").map(|s| s.text.trim().to_string()).unwrap_or_else(|| format!("user config `{name}`"));

    let range: crate::corpus::RangeFn = Arc::new(move |n, p| {
        let env = RowEnv::new(p, n, None);
        Ok((integer(eval_with(&lo, &env)?, "lo")?, integer(eval_with(&hi, &env)?, "hi")?))
    });
    let guard: Option<crate::corpus::GuardFn> = if guards.is_empty() {
        None
    } else {
        Some(Arc::new(move |n, p| {
            let env = RowEnv::new(p, n, None);
            for g in &guards {
                if eval_with(g, &env)?.is_zero() {
                    return Err(EvalError::Arith(ArithError::DivisionByZero));
                }
            }
            Ok(())
        }))
    };
    Ok(LoadedConfig::Identity(IdentityDef {
        id: name,
        citation,
        params,
        n_max,
        range,
        summand: term_fn(lhs),
        rhs: row_fn(rhs),
        certificate,
        guard,
        terminating,
    }))
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config(&src)
}

/// Loads a summation identity; recurrence configs are rejected.
pub fn load_identity_config(path: &Path) -> Result<IdentityDef, ConfigError> {
    match load_config(path)? {
        LoadedConfig::Identity(d) => Ok(d),
        LoadedConfig::Recurrence(r) => Err(schema(format!("`{}` defines a recurrence, not a summation identity", r.name))),
    }
}

/// Parameter kinds as written in config files, for messages and docs.
pub fn describe_params(params: &[ParamSpec]) -> BTreeMap<String, String> {
    params
        .iter()
        .map(|p| {
            let kind = match &p.kind {
                ParamKind::Free => "free".to_string(),
                ParamKind::Base => "base".to_string(),
                ParamKind::Natural { min, max } => format!("nat({min}..{max})"),
                ParamKind::Sequence { lo, extra } => format!("seq({lo}..n_max+{extra})"),
            };
            (p.name.clone(), kind)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::evaluate_identity;

    const BINOMIAL: &str = "\
# binomial theorem
name: binomial
params: x
lhs: (-1)^k * rf(-n, k) * x^k
     / rf(1, k)
range: 0 .. n
rhs: (1 + x)^n
cert_u: x*(n - k + 1)
cert_v: k
terminating: yes
";

    fn identity(src: &str) -> IdentityDef {
        match parse_config(src).unwrap() {
            LoadedConfig::Identity(d) => d,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loads_binomial() {
        let d = identity(BINOMIAL);
        assert_eq!(d.id, "binomial");
        assert!(d.certificate.is_some() && d.terminating);
        let p = Params::new().with("x", 3);
        assert_eq!(evaluate_identity(&d, 4, &p).unwrap(), (Rational::from(256), Rational::from(256)));
    }

    #[test]
    fn missing_section() {
        let src = BINOMIAL.replace("rhs: (1 + x)^n\n", "");
        assert!(matches!(parse_config(&src), Err(ConfigError::Schema(m)) if m.contains("`rhs`")));
    }

    #[test]
    fn unbound_variable_in_rhs() {
        let src = BINOMIAL.replace("rhs: (1 + x)^n", "rhs: (1 + y)^n");
        assert!(matches!(parse_config(&src), Err(ConfigError::Schema(m)) if m.contains("`y`")));
        let src = BINOMIAL.replace("rhs: (1 + x)^n", "rhs: (1 + x)^k");
        assert!(matches!(parse_config(&src), Err(ConfigError::Schema(m)) if m.contains("`k`")));
    }

    #[test]
    fn syntax_errors_point_into_the_file() {
        let src = BINOMIAL.replace("     / rf(1, k)", "     / rf(1, k");
        match parse_config(&src) {
            Err(ConfigError::Syntax { section, error }) => {
                assert_eq!(section, "lhs");
                assert_eq!(error.line, 5);
            }
            other => panic!("{other:?}"),
        }
        let src = BINOMIAL.replace("rhs: (1 + x)^n", "rhs: (1 + x)^^n");
        match parse_config(&src) {
            Err(ConfigError::Syntax { error, .. }) => assert_eq!((error.line, error.column), (7, 14)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_checks() {
        assert!(parse_config(&BINOMIAL.replace("cert_v: k\n", "")).is_err());
        assert!(parse_config(&BINOMIAL.replace("params: x", "params: n")).is_err());
        assert!(parse_config(&BINOMIAL.replace("params: x", "params: x:wide")).is_err());
        assert!(parse_config(&format!("{BINOMIAL}bogus: 1\n")).is_err());
        assert!(parse_config(&format!("{BINOMIAL}rec_a: 1\n")).is_err());
        assert!(parse_config(&BINOMIAL.replace("range: 0 .. n", "range: 0, n")).is_err());
    }

    #[test]
    fn param_kinds() {
        let p = parse_params("q:base, m:nat(1..4), z").unwrap();
        assert_eq!(p[0].kind, ParamKind::Base);
        assert_eq!(p[1].kind, ParamKind::Natural { min: 1, max: 4 });
        assert_eq!(p[2].kind, ParamKind::Free);
    }

    #[test]
    fn guards_reject_points() {
        let d = identity(&format!("{BINOMIAL}nonzero: x - 2\n"));
        assert!(evaluate_identity(&d, 1, &Params::new().with("x", 3)).is_ok());
        assert!(evaluate_identity(&d, 1, &Params::new().with("x", 2)).unwrap_err().is_inadmissible());
    }

    #[test]
    fn recurrence_form() {
        let src = "name: fibo\nrec_a: 1\nrec_b: 1\nx0: 0\nx1: 1\nn_max: 8\n";
        match parse_config(src).unwrap() {
            LoadedConfig::Recurrence(r) => {
                let spec = r.spec(&Params::new(), 12).unwrap();
                assert_eq!(spec.generate(12).unwrap()[12], Rational::from(144));
                assert_eq!(r.n_max, 8);
            }
            other => panic!("{other:?}"),
        }
    }
}
