//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Expected values come from direct computation here (plain integer
//! recurrences, hand-summed rows), never from the code under test.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;

use teleid::corpus::elementary::{self, Mode};
use teleid::corpus::{evaluate_identity, lookup, verify_identity};
use teleid::exprlang::poly::Method;
use teleid::ez::{ez_full_verify, perturb_certificate, perturb_rhs, Side};
use teleid::genhyp::{checks_for, verify_genhyp, Macdonald};
use teleid::params::{random_rational, sample_rng};
use teleid::report::Report;
use teleid::sequences::{self, family, family_sides, goyt_mathisen, random_recurrence_sample, verify_family_suite, LUCAS_GEN};
use teleid::telescope::{solve_linear_recurrence, telescoping_closed_form, telescoping_sum, SeqFn, TelescopeProblem};
use teleid::{Params, Rational};

const SEED: u64 = 7919;

const KERNEL_PROBLEMS: u32 = 1000;
const KERNEL_MAX_DOMAIN: usize = 12;
const KERNEL_TIME_LIMIT: Duration = Duration::from_secs(5);

const BASIC_N_MAX: i64 = 20;
const CLASSICAL_N_MAX: i64 = 15;
const CLASSICAL_SAMPLES: u32 = 32;
const Q_N_MAX: i64 = 12;
const Q_DOUGALL_N_MAX: i64 = 8;
const Q_SAMPLES: u32 = 32;
const Q_TIME_LIMIT: Duration = Duration::from_secs(60);
const EZ_N_MAX: i64 = 10;
const EZ_SAMPLES: u32 = 32;
const ELEMENTARY_SAMPLES: u32 = 1000;
const GENHYP_TUPLES: u32 = 1000;
/// Sequences of length 10.
const GENHYP_N_MAX: i64 = 9;
const RECURRENCE_SPECS: u32 = 1000;
const RECURRENCE_N_MAX: i64 = 10;
const FAMILY_N_MAX: i64 = 12;
const FAMILY_SAMPLES: u32 = 8;
const MUTATION_N_MAX: i64 = 6;
const MUTATION_SAMPLES: u32 = 4;

type Verdict = Result<String, String>;

fn int(n: i64) -> Rational {
    Rational::from(n)
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn clean(report: &Report, what: &str) -> Result<(), String> {
    match report.first_failure() {
        None if report.totals.pass > 0 => Ok(()),
        None => Err(format!("{what}: no passing records")),
        Some(r) => Err(format!("{what}: {}/{}/{} sample {} fails at n = {}", r.suite, r.identity, r.check, r.sample, r.n)),
    }
}

/// `w_k/w_0 · (u_0···u_{k-1})/(v_1···v_k)` summed without running products,
/// against `(u_0/w_0)((u_1···u_n)/(v_1···v_n) - v_0/u_0)`.
fn kernel_oracle(u: &[Rational], v: &[Rational]) -> Option<(Rational, Rational)> {
    let n = u.len() - 1;
    let w: Vec<Rational> = u.iter().zip(v).map(|(a, b)| a - b).collect();
    if w[0].is_zero() || u[0].is_zero() || v[1..].iter().any(Rational::is_zero) {
        return None;
    }
    let mut lhs = Rational::zero();
    for k in 0..=n {
        let num: Rational = u[..k].iter().cloned().product();
        let den: Rational = v[1..=k].iter().cloned().product();
        lhs += (&w[k] * num).checked_div(&(&w[0] * den)).ok()?;
    }
    let ratio = u[1..].iter().cloned().product::<Rational>().checked_div(&v[1..].iter().cloned().product()).ok()?;
    let rhs = u[0].checked_div(&w[0]).ok()? * (ratio - v[0].checked_div(&u[0]).ok()?);
    Some((lhs, rhs))
}

fn c1_kernel() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    for s in 0..KERNEL_PROBLEMS {
        let mut rng = sample_rng(SEED, "kernel", s);
        let (u, v, n, oracle) = loop {
            let n = rng.gen_range(0..=KERNEL_MAX_DOMAIN);
            let u: Vec<Rational> = (0..=n).map(|_| random_rational(&mut rng)).collect();
            let v: Vec<Rational> = (0..=n).map(|_| random_rational(&mut rng)).collect();
            if let Some(o) = kernel_oracle(&u, &v) {
                break (u, v, n, o);
            }
        };
        ensure(oracle.0 == oracle.1, || format!("oracle disagrees with itself on problem {s}"))?;
        let p = TelescopeProblem::new(SeqFn::from_values(0, u), SeqFn::from_values(0, v), n).map_err(|e| e.to_string())?;
        let sum = telescoping_sum(&p).map_err(|e| e.to_string())?;
        let closed = telescoping_closed_form(&p).map_err(|e| e.to_string())?;
        ensure(sum == oracle.0 && closed == oracle.0, || format!("problem {s}: sum {sum}, closed {closed}, oracle {}", oracle.0))?;
        checked += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < KERNEL_TIME_LIMIT, || format!("{elapsed:.2?} exceeds {KERNEL_TIME_LIMIT:?}"))?;
    Ok(format!("{checked} problems, 0 mismatches, {elapsed:.2?}"))
}

/// `x_0 = 0, x_1 = 1, x_{n+2} = a x_{n+1} + b x_n` in machine integers.
fn linear_terms(a: i64, b: i64, len: usize) -> Vec<i64> {
    let mut x = vec![0, 1];
    while x.len() < len {
        let m = x.len();
        x.push(a * x[m - 1] + b * x[m - 2]);
    }
    x
}

fn family_spot(name: &str, id: &str, n: i64) -> Result<(Rational, Rational), String> {
    let fam = family(name).ok_or_else(|| format!("no family {name}"))?;
    let ident = fam.identities.iter().find(|i| i.id == id).ok_or_else(|| format!("no identity {name}/{id}"))?;
    family_sides(&fam, ident, n, &Params::new()).map_err(|e| e.to_string())
}

fn six_identities(name: &str, n_max: i64) -> Result<(), String> {
    let fam = family(name).ok_or_else(|| format!("no family {name}"))?;
    let ids: Vec<&str> = fam.identities.iter().map(|i| i.id).collect();
    ensure(ids == LUCAS_GEN, || format!("{name} identities {ids:?}"))?;
    let report = verify_family_suite(&fam, n_max, 1, SEED);
    clean(&report, name)?;
    ensure(report.totals.pass == 6, || format!("{name}: {} records", report.totals.pass))
}

fn c2_fibonacci() -> Verdict {
    six_identities("fibonacci", BASIC_N_MAX)?;
    let f = linear_terms(1, 1, 13);
    let expected: i64 = f[1..=10].iter().sum();
    ensure(expected == 143 && f[12] - 1 == 143, || "oracle spot".into())?;
    let (lhs, rhs) = family_spot("fibonacci", "sum", 10)?;
    ensure(lhs == int(143) && rhs == int(143), || format!("sum at n = 10: {lhs} vs {rhs}"))?;
    Ok(format!("6 identities exact for n <= {BASIC_N_MAX}; sum_1^10 F_k = 143 = F_12 - 1"))
}

fn c3_derangement() -> Verdict {
    // d_0 = 1, d_1 = 0, d_m = (m-1)(d_{m-1} + d_{m-2})
    let mut d: Vec<i64> = vec![1, 0];
    for m in 2..=10 {
        d.push((m - 1) * (d[m as usize - 1] + d[m as usize - 2]));
    }
    let spec = sequences::shifted_derangement(10);
    let got = spec.generate(5).map_err(|e| e.to_string())?;
    let want: Vec<Rational> = [0, 1, 2, 9, 44, 265].into_iter().map(int).collect();
    ensure(got == want, || format!("D = {got:?}"))?;
    ensure(got.iter().zip(&d[1..]).all(|(g, o)| *g == int(*o)), || "D_n != d_{n+1}".into())?;
    six_identities("derangement", BASIC_N_MAX)?;
    let b = SeqFn::from_fn_total(0, 4, int);
    let c = SeqFn::from_fn_total(0, 4, Rational::sign_power);
    let x5 = solve_linear_recurrence(&b, &c, &int(0), 4).map_err(|e| e.to_string())?;
    ensure(x5 == int(d[4]) && x5 == int(9), || format!("x_5 = {x5}, d_4 = {}", d[4]))?;
    Ok(format!("D = 0,1,2,9,44,265; 6 identities exact for n <= {BASIC_N_MAX}; solver x_5 = 9 = d_4"))
}

fn c4_pell() -> Verdict {
    six_identities("pell", BASIC_N_MAX)?;
    let p = linear_terms(2, 1, 5);
    let expected: i64 = p[1..=3].iter().map(|x| 2 * x * x).sum();
    ensure(expected == 60 && p[3] * p[4] == 60, || "oracle spot".into())?;
    let (lhs, rhs) = family_spot("pell", "square", 3)?;
    ensure(lhs == int(60) && rhs == int(60), || format!("square at n = 3: {lhs} vs {rhs}"))?;
    Ok(format!("6 identities exact for n <= {BASIC_N_MAX}; sum_1^3 2 P_k^2 = 60 = P_3 P_4"))
}

fn corpus_sweep(ids: &[&str], n_max: impl Fn(&str) -> i64, samples: u32) -> Result<usize, String> {
    let mut total = 0;
    for id in ids {
        let def = lookup(id).ok_or_else(|| format!("no identity {id}"))?;
        let report = verify_identity(&def, n_max(id), samples, SEED);
        clean(&report, id)?;
        let passing = report.records.iter().filter(|r| r.check == "identity" && r.n == n_max(id)).count();
        ensure(passing >= samples as usize, || format!("{id}: only {passing} samples reached n = {}", n_max(id)))?;
        total += report.totals.pass;
    }
    Ok(total)
}

fn c5_classical() -> Verdict {
    let classical = [
        "binomial",
        "binomial_x1",
        "chu_vandermonde",
        "pfaff_saalschutz",
        "ramanujan_entry25",
        "rising_fact_sum",
        "reciprocal_rising_fact_sum",
    ];
    let records = corpus_sweep(&classical, |_| CLASSICAL_N_MAX, CLASSICAL_SAMPLES)?;
    // n = 2, a = 1, b = 3: 1 + (1)(-2)/(3·1) + (1·2)(-2·-1)/((3·4)·2) and (2)_2/(3)_2.
    let by_hand = int(1) + frac(-2, 3) + frac(4, 24);
    let closed = frac(2 * 3, 3 * 4);
    ensure(by_hand == frac(1, 2) && closed == frac(1, 2), || "oracle spot".into())?;
    let def = lookup("chu_vandermonde").unwrap();
    let (lhs, rhs) = evaluate_identity(&def, 2, &Params::new().with("a", 1).with("b", 3)).map_err(|e| e.to_string())?;
    ensure(lhs == by_hand && rhs == closed, || format!("CV(2, 1, 3): {lhs} vs {rhs}"))?;
    Ok(format!(
        "{} identities, {CLASSICAL_SAMPLES} samples, n <= {CLASSICAL_N_MAX}, {records} passing records; CV(2,1,3) = 1/2",
        classical.len()
    ))
}

fn c6_q_corpus() -> Verdict {
    let start = Instant::now();
    let ids = ["q_binomial", "q_chu_vandermonde", "q_pfaff_saalschutz", "q_dougall"];
    let n_max = |id: &str| if id == "q_dougall" { Q_DOUGALL_N_MAX } else { Q_N_MAX };
    let records = corpus_sweep(&ids, n_max, Q_SAMPLES)?;
    let elapsed = start.elapsed();
    ensure(elapsed < Q_TIME_LIMIT, || format!("{elapsed:.2?} exceeds {Q_TIME_LIMIT:?}"))?;
    Ok(format!("{records} passing records, n <= {Q_N_MAX} (q_dougall n <= {Q_DOUGALL_N_MAX}), {elapsed:.2?}"))
}

const CERTIFIED: [&str; 7] =
    ["binomial", "chu_vandermonde", "pfaff_saalschutz", "q_binomial", "q_chu_vandermonde", "q_pfaff_saalschutz", "q_dougall"];

fn c7_ez() -> Verdict {
    let mut records = 0;
    for id in CERTIFIED {
        let def = lookup(id).ok_or_else(|| format!("no identity {id}"))?;
        let report = ez_full_verify(&def, EZ_N_MAX, EZ_SAMPLES, SEED).map_err(|e| format!("{id}: {e}"))?;
        clean(&report, id)?;
        for check in ["base_case", "difference", "boundary", "telescope_zero"] {
            let n = report.records.iter().filter(|r| r.check == check).count();
            ensure(n == EZ_SAMPLES as usize, || format!("{id}/{check}: {n} records"))?;
        }
        records += report.totals.pass;
    }
    Ok(format!("{} certificates, {records} passing records, n <= {EZ_N_MAX}", CERTIFIED.len()))
}

fn c8_elementary() -> Verdict {
    let all = elementary::elementary_identities();
    ensure(all.len() >= 6, || format!("{} elementary identities", all.len()))?;
    let mut grid_points = 0;
    for e in &all {
        let grid = elementary::check_rational_identity(e, Mode::Grid, SEED, 1);
        clean(&grid, e.id)?;
        match elementary::certification_method(e).map_err(|err| format!("{}: {err}", e.id))? {
            Method::Grid { points } => grid_points += points,
            Method::Symbolic { .. } => {}
        }
        let sampled = elementary::check_rational_identity(e, Mode::Sampled, SEED, ELEMENTARY_SAMPLES);
        clean(&sampled, e.id)?;
        ensure(sampled.totals.pass == ELEMENTARY_SAMPLES as usize, || format!("{}: {} sampled passes", e.id, sampled.totals.pass))?;
    }
    let (a, b) = (frac(3, 7), frac(-5, 2));
    let qchv = elementary::elementary("qchv_elem").unwrap();
    let point = [("a".to_string(), a.clone()), ("b".to_string(), b.clone())].into_iter().collect();
    let (lhs, rhs) = qchv.sides(&point).map_err(|e| e.to_string())?;
    let by_hand = (int(1) - &b) * &a - (int(1) - &a) * &b;
    ensure(lhs == by_hand && rhs == &a - &b, || "(1-b)a - (1-a)b spot".into())?;
    Ok(format!("{} identities certified ({grid_points} grid points), {ELEMENTARY_SAMPLES} samples each", all.len()))
}

fn c9_genhyp() -> Verdict {
    let mut laws = Vec::new();
    for kind in Macdonald::ALL {
        let report = verify_genhyp(kind, GENHYP_N_MAX, GENHYP_TUPLES, SEED);
        clean(&report, kind.id())?;
        for check in checks_for(kind) {
            let n = report.records.iter().filter(|r| r.check == *check && r.status == teleid::Status::Pass).count();
            ensure(n == GENHYP_TUPLES as usize, || format!("{}/{check}: {n} passing tuples", kind.id()))?;
            if *check != "identity" {
                laws.push(*check);
            }
        }
    }
    ensure(laws.contains(&"relabeling") && laws.contains(&"d_zero"), || format!("laws run: {laws:?}"))?;
    Ok(format!("4 sums x {GENHYP_TUPLES} tuples of length {}; relabeling and d = 0 laws exact", GENHYP_N_MAX + 1))
}

fn c10_recurrences() -> Verdict {
    let records: Vec<_> = (0..RECURRENCE_SPECS).flat_map(|s| random_recurrence_sample(RECURRENCE_N_MAX, s, SEED)).collect();
    let report = Report::new("sequences", SEED, records);
    clean(&report, "random_recurrence")?;
    ensure(report.totals.pass == 6 * RECURRENCE_SPECS as usize, || format!("{} passing records", report.totals.pass))?;
    Ok(format!("6 identities x {RECURRENCE_SPECS} specs, n <= {RECURRENCE_N_MAX}"))
}

fn c11_q_families() -> Verdict {
    let mut printed = 0;
    for name in ["schur", "q_pell", "goyt_sagan", "goyt_mathisen"] {
        let fam = family(name).ok_or_else(|| format!("no family {name}"))?;
        let report = verify_family_suite(&fam, FAMILY_N_MAX, FAMILY_SAMPLES, SEED);
        clean(&report, name)?;
        let want = fam.identities.len() * FAMILY_SAMPLES as usize;
        ensure(report.totals.pass == want, || format!("{name}: {} of {want} records pass", report.totals.pass))?;
        printed += fam.identities.len();
    }
    let (x, y, q) = (frac(2, 3), frac(-5, 4), frac(3, 11));
    let f = goyt_mathisen(&x, &y, &q, 3).and_then(|s| s.generate(3)).map_err(|e| e.to_string())?;
    ensure(f[2] == x, || format!("F_2 = {}", f[2]))?;
    let expected = &q * &x * &x + &y;
    ensure(f[3] == expected, || format!("F_3 = {}", f[3]))?;
    Ok(format!("{printed} identities over {FAMILY_SAMPLES} samples, n <= {FAMILY_N_MAX}; F_2 = x, F_3 = q x^2 + y"))
}

fn c12_mutation() -> Verdict {
    let mut caught = 0;
    for def in teleid::corpus::builtin_identities() {
        let Some(cert) = def.certificate.clone() else { continue };
        let shift = sample_rng(SEED, &def.id, 0).gen_range(1..=5);
        for side in [Side::U, Side::V] {
            let broken = def.clone().with_certificate(Some(perturb_certificate(&cert, side, shift)));
            let report = ez_full_verify(&broken, MUTATION_N_MAX, MUTATION_SAMPLES, SEED).map_err(|e| e.to_string())?;
            ensure(!report.all_pass(), || format!("{} {side:?} * (k + {shift}) went unnoticed", def.id))?;
            caught += 1;
        }
        let broken = perturb_rhs(&def, shift);
        let corpus = verify_identity(&broken, MUTATION_N_MAX, MUTATION_SAMPLES, SEED);
        let ez = ez_full_verify(&broken, MUTATION_N_MAX, MUTATION_SAMPLES, SEED).map_err(|e| e.to_string())?;
        ensure(!corpus.all_pass() && !ez.all_pass(), || format!("{} rhs * (1 + n/{shift}) went unnoticed", def.id))?;
        caught += 2;
    }
    ensure(caught >= 4 * CERTIFIED.len(), || format!("only {caught} mutants"))?;
    Ok(format!("{caught} mutants, all reported"))
}

fn c13_cli_determinism() -> Verdict {
    let tests = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests");
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_teleid")).args(args).current_dir(&tests).output().map_err(|e| e.to_string())
    };
    let args = ["verify", "--suite", "all", "--samples", "2", "--seed", "3", "--format", "json"];
    let first = run(&[&args[..], &["--jobs", "1"]].concat())?;
    let second = run(&[&args[..], &["--jobs", "3"]].concat())?;
    ensure(first.status.code() == Some(0), || format!("exit {:?}", first.status.code()))?;
    ensure(first.stdout == second.stdout, || "JSON differs between runs".into())?;
    let golden = std::fs::read(tests.join("golden/chu_vandermonde.json")).map_err(|e| e.to_string())?;
    let now = run(&["verify", "--suite", "corpus", "--id", "chu_vandermonde", "--n-max", "10", "--seed", "7", "--samples", "4", "--format", "json"])?;
    ensure(now.stdout == golden, || "golden file mismatch".into())?;
    Ok(format!("{} byte report identical across --jobs 1/3; golden file matches", first.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 13] = [
        ("telescoping kernel oracle", c1_kernel),
        ("fibonacci suite", c2_fibonacci),
        ("derangement suite", c3_derangement),
        ("pell suite", c4_pell),
        ("classical hypergeometric corpus", c5_classical),
        ("q-corpus and q-dougall", c6_q_corpus),
        ("ez certificates", c7_ez),
        ("elementary identities", c8_elementary),
        ("generalized hypergeometric sums", c9_genhyp),
        ("six identities on random recurrences", c10_recurrences),
        ("q-sequence families", c11_q_families),
        ("mutation sensitivity", c12_mutation),
        ("cli determinism", c13_cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
