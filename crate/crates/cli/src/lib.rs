//! Suite selection, parallel execution and report rendering for the
//! `teleid` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use teleid::corpus::elementary::{self, Mode};
use teleid::corpus::{builtin_identities, identity_sample, IdentityDef};
use teleid::exprlang::{load_config, ConfigError, LoadedConfig, RecurrenceConfig};
use teleid::ez::ez_sample;
use teleid::genhyp::{genhyp_sample, Macdonald};
use teleid::report::{CheckRecord, Report, Status};
use teleid::sequences::{self, family_sample, family_sample_count, families, random_recurrence_sample, LUCAS_GEN};
use teleid::sweep::{sampled_records, SampleSite};

pub const DEFAULT_SEED: u64 = 7919;
pub const DEFAULT_SAMPLES: u32 = 32;
/// Sequence tuples of length `GENHYP_N_MAX + 1`.
pub const GENHYP_N_MAX: i64 = 9;
pub const RANDOM_RECURRENCE_N_MAX: i64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Corpus,
    Ez,
    Sequences,
    Genhyp,
    Elementary,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Corpus => "corpus",
            Suite::Ez => "ez",
            Suite::Sequences => "sequences",
            Suite::Genhyp => "genhyp",
            Suite::Elementary => "elementary",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub id: Option<String>,
    pub n_max: Option<i64>,
    pub samples: u32,
    pub seed: u64,
    pub grid: bool,
    pub jobs: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { id: None, n_max: None, samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED, grid: false, jobs: None }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Config(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

type Task = Box<dyn Fn() -> Vec<CheckRecord> + Send + Sync>;

/// Work items plus the human-readable statement of each (identity, check).
#[derive(Default)]
struct Plan {
    tasks: Vec<Task>,
    statements: BTreeMap<(String, String), String>,
    matched: bool,
}

impl Plan {
    fn push(&mut self, task: impl Fn() -> Vec<CheckRecord> + Send + Sync + 'static) {
        self.tasks.push(Box::new(task));
    }

    fn wants(&mut self, opts: &RunOptions, id: &str) -> bool {
        let hit = opts.id.as_deref().is_none_or(|want| want == id);
        self.matched |= hit;
        hit
    }
}

fn n_max_or(opts: &RunOptions, default: i64) -> i64 {
    opts.n_max.unwrap_or(default)
}

fn plan_corpus(plan: &mut Plan, opts: &RunOptions) {
    for def in builtin_identities() {
        if plan.wants(opts, &def.id) {
            plan_identity(plan, def, opts, "corpus");
        }
    }
}

fn plan_identity(plan: &mut Plan, def: IdentityDef, opts: &RunOptions, suite: &'static str) {
    let n_max = n_max_or(opts, def.n_max);
    let seed = opts.seed;
    plan.statements.insert((def.id.clone(), "identity".into()), def.citation.clone());
    for s in 0..opts.samples {
        let def = def.clone();
        plan.push(move || identity_sample(&def, suite, n_max, s, seed));
    }
}

fn plan_ez_identity(plan: &mut Plan, def: IdentityDef, opts: &RunOptions) {
    let n_max = n_max_or(opts, def.n_max);
    let seed = opts.seed;
    for s in 0..opts.samples {
        let def = def.clone();
        plan.push(move || ez_sample(&def, "ez", n_max, s, seed));
    }
}

fn plan_ez(plan: &mut Plan, opts: &RunOptions) -> Result<(), CliError> {
    for def in builtin_identities() {
        if !plan.wants(opts, &def.id) {
            continue;
        }
        if def.certificate.is_none() {
            if opts.id.is_some() {
                return Err(CliError::Usage(format!("identity `{}` has no certificate", def.id)));
            }
            continue;
        }
        plan_ez_identity(plan, def, opts);
    }
    Ok(())
}

fn plan_sequences(plan: &mut Plan, opts: &RunOptions) {
    for fam in families() {
        if !plan.wants(opts, fam.name) {
            continue;
        }
        for ident in &fam.identities {
            plan.statements.insert((fam.name.into(), ident.id.into()), ident.display.into());
        }
        let n_max = n_max_or(opts, fam.n_max);
        let seed = opts.seed;
        for s in 0..family_sample_count(&fam, opts.samples) {
            let fam = fam.clone();
            plan.push(move || family_sample(&fam, n_max, s, seed));
        }
    }
    if plan.wants(opts, sequences::RANDOM_RECURRENCE) {
        let n_max = n_max_or(opts, RANDOM_RECURRENCE_N_MAX);
        let seed = opts.seed;
        for s in 0..opts.samples {
            plan.push(move || random_recurrence_sample(n_max, s, seed));
        }
    }
}

fn plan_genhyp(plan: &mut Plan, opts: &RunOptions) {
    for kind in Macdonald::ALL {
        if !plan.wants(opts, kind.id()) {
            continue;
        }
        plan.statements.insert((kind.id().into(), "identity".into()), kind.citation().into());
        let n_max = n_max_or(opts, GENHYP_N_MAX);
        let seed = opts.seed;
        for s in 0..opts.samples {
            plan.push(move || genhyp_sample(kind, n_max, s, seed));
        }
    }
}

fn plan_elementary(plan: &mut Plan, opts: &RunOptions) {
    for e in elementary::elementary_identities() {
        if !plan.wants(opts, e.id) {
            continue;
        }
        plan.statements.insert((e.id.into(), Mode::Sampled.check().into()), e.citation.into());
        let seed = opts.seed;
        for s in 0..opts.samples {
            let e = e.clone();
            plan.push(move || elementary::elementary_sample(&e, s, seed));
        }
        if opts.grid {
            plan.push(move || vec![elementary::elementary_grid(&e)]);
        }
    }
    if plan.wants(opts, elementary::SPECIALIZATION_ID) {
        let seed = opts.seed;
        for s in 0..opts.samples {
            plan.push(move || elementary::specialization_sample(s, seed));
        }
    }
}

fn execute(plan: Plan, jobs: Option<usize>) -> Result<Vec<CheckRecord>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| plan.tasks.par_iter().flat_map_iter(|t| t()).collect()))
}

fn flags(opts: &RunOptions) -> BTreeMap<String, String> {
    let mut f = BTreeMap::new();
    f.insert("id".into(), opts.id.clone().unwrap_or_else(|| "*".into()));
    f.insert("n_max".into(), opts.n_max.map_or_else(|| "default".into(), |n| n.to_string()));
    f.insert("samples".into(), opts.samples.to_string());
    f.insert("grid".into(), opts.grid.to_string());
    f
}

/// A finished run: the report plus statement strings for text output.
pub struct Outcome {
    pub report: Report,
    pub statements: BTreeMap<(String, String), String>,
}

fn validate(opts: &RunOptions) -> Result<(), CliError> {
    if opts.n_max.is_some_and(|n| n < 0) {
        return Err(CliError::Usage("--n-max must be non-negative".into()));
    }
    if opts.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    Ok(())
}

pub fn run_verify(suite: Suite, opts: &RunOptions) -> Result<Outcome, CliError> {
    validate(opts)?;
    let start = Instant::now();
    let mut plan = Plan::default();
    if suite.includes(Suite::Corpus) {
        plan_corpus(&mut plan, opts);
    }
    if suite.includes(Suite::Ez) {
        plan_ez(&mut plan, opts)?;
    }
    if suite.includes(Suite::Sequences) {
        plan_sequences(&mut plan, opts);
    }
    if suite.includes(Suite::Genhyp) {
        plan_genhyp(&mut plan, opts);
    }
    if suite.includes(Suite::Elementary) {
        plan_elementary(&mut plan, opts);
    }
    if !plan.matched {
        let id = opts.id.as_deref().unwrap_or("");
        return Err(CliError::Usage(format!("no identity `{id}` in suite `{}`", suite.name())));
    }
    let statements = std::mem::take(&mut plan.statements);
    let records = execute(plan, opts.jobs)?;
    let mut report = Report::new(suite.name(), opts.seed, records);
    report.flags = flags(opts);
    report.wall_time = start.elapsed();
    Ok(Outcome { report, statements })
}

fn plan_recurrence(plan: &mut Plan, rc: RecurrenceConfig, opts: &RunOptions) {
    let n_max = n_max_or(opts, rc.n_max);
    let seed = opts.seed;
    for s in 0..opts.samples {
        let rc = rc.clone();
        plan.push(move || {
            let site = SampleSite { suite: "sequences", identity: &rc.name, seed, sample: s, n_max };
            sampled_records(site, &LUCAS_GEN, &rc.params, |p| sequences::lucas_outcomes(&rc.spec(p, 2 * n_max + 2)?, n_max))
        });
    }
}

/// Verifies a user config: identity configs run the corpus checks and, when
/// a certificate is given, the EZ checks; recurrence configs run the six
/// generalized identities.
pub fn run_check(path: &Path, opts: &RunOptions) -> Result<Outcome, CliError> {
    validate(opts)?;
    let start = Instant::now();
    let mut plan = Plan::default();
    match load_config(path).map_err(CliError::Config)? {
        LoadedConfig::Identity(def) => {
            if def.certificate.is_some() {
                plan_ez_identity(&mut plan, def.clone(), opts);
            }
            plan_identity(&mut plan, def, opts, "corpus");
        }
        LoadedConfig::Recurrence(rc) => plan_recurrence(&mut plan, rc, opts),
    }
    let statements = std::mem::take(&mut plan.statements);
    let records = execute(plan, opts.jobs)?;
    let mut report = Report::new("config", opts.seed, records);
    report.flags = flags(opts);
    report.flags.insert("config".into(), path.display().to_string());
    report.wall_time = start.elapsed();
    Ok(Outcome { report, statements })
}

pub fn render_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Inadmissible => "SKIP",
    }
}

/// One line per (suite, identity, check) group, then a witness block per failure.
pub fn render_text(outcome: &Outcome) -> String {
    let report = &outcome.report;
    let mut groups: BTreeMap<(&str, &str, &str), (usize, usize, usize, i64)> = BTreeMap::new();
    for r in &report.records {
        let g = groups.entry((&r.suite, &r.identity, &r.check)).or_default();
        match r.status {
            Status::Pass => g.0 += 1,
            Status::Fail => g.1 += 1,
            Status::Inadmissible => g.2 += 1,
        }
        g.3 = g.3.max(r.n);
    }
    let mut out = String::new();
    let _ = writeln!(out, "suite {} seed {}", report.suite, report.seed);
    for ((suite, id, check), (pass, fail, skip, n)) in &groups {
        let status = if *fail > 0 { Status::Fail } else { Status::Pass };
        let _ = write!(out, "{} {suite}/{id}/{check}: {pass} pass, {fail} fail", status_word(status));
        if *skip > 0 {
            let _ = write!(out, ", {skip} inadmissible");
        }
        if *fail == 0 {
            let _ = write!(out, " (n <= {n})");
        }
        if let Some(s) = outcome.statements.get(&(id.to_string(), check.to_string())) {
            let _ = write!(out, "  [{s}]");
        }
        out.push('\n');
    }
    for r in report.failures() {
        let _ = writeln!(out, "\nFAIL {}/{}/{} sample {} n = {}", r.suite, r.identity, r.check, r.sample, r.n);
        if let Some(w) = &r.witness {
            let _ = writeln!(out, "  {}", w.detail);
            for (k, v) in &w.inputs {
                let _ = writeln!(out, "  {k} = {v}");
            }
            if let (Some(l), Some(rr)) = (&w.lhs, &w.rhs) {
                let _ = writeln!(out, "  lhs = {l}\n  rhs = {rr}");
            }
        }
    }
    let t = &report.totals;
    let _ = writeln!(
        out,
        "\ntotal: {} pass, {} fail, {} inadmissible in {:.2?}",
        t.pass, t.fail, t.inadmissible, report.wall_time
    );
    out
}

/// Identifiers accepted by `--id`, grouped by suite, with citations.
pub fn list_text() -> String {
    let mut out = String::new();
    let _ = writeln!(out, "corpus (suite corpus; certified entries also run in suite ez):");
    for def in builtin_identities() {
        let mark = if def.certificate.is_some() { " [ez]" } else { "" };
        let _ = writeln!(out, "  {:<28} {}{mark}", def.id, def.citation);
    }
    let _ = writeln!(out, "sequences:");
    for fam in families() {
        let ids: Vec<&str> = fam.identities.iter().map(|i| i.id).collect();
        let _ = writeln!(out, "  {:<28} {} ({})", fam.name, fam.citation, ids.join(", "));
    }
    let _ = writeln!(out, "  {:<28} six generalized identities on seeded random recurrences", sequences::RANDOM_RECURRENCE);
    let _ = writeln!(out, "genhyp:");
    for kind in Macdonald::ALL {
        let _ = writeln!(out, "  {:<28} {}", kind.id(), kind.citation());
    }
    let _ = writeln!(out, "elementary:");
    for e in elementary::elementary_identities() {
        let _ = writeln!(out, "  {:<28} {}", e.id, e.citation);
    }
    let _ = writeln!(out, "  {:<28} q-Dougall n = 1 row against dougall_n1", elementary::SPECIALIZATION_ID);
    out
}
