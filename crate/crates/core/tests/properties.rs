use proptest::prelude::*;

use teleid::arith::prod_range;
use teleid::corpus::{builtin_identities, evaluate_identity};
use teleid::genhyp::{macdonald_sides, relabeling_law, d_zero_law, GenhypError, Macdonald, SequenceParams};
use teleid::params::{sample_params, sample_rng};
use teleid::sequences::{
    family, family_outcomes, fibonacci, fibonacci_poly, lucas_gen_check, pell, shifted_derangement, LucasError,
    RecurrenceSpec,
};
use teleid::telescope::{
    raw_euler_sum, solve_linear_recurrence, sum_to_telescope, telescoping_closed_form, telescoping_sum, SeqFn,
    TelescopeProblem,
};
use teleid::{ArithError, EvalError, Params, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-64i64..=64, 1i64..=64).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn nonzero() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

fn seq(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(nonzero(), len)
}

fn int(n: i64) -> Rational {
    Rational::from(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lemma_sum_equals_closed_form((u, v) in (0usize..=12).prop_flat_map(|n| (seq(n + 1), seq(n + 1)))) {
        let n = u.len() - 1;
        let p = TelescopeProblem::new(SeqFn::from_values(0, u), SeqFn::from_values(0, v), n).unwrap();
        match (telescoping_sum(&p), telescoping_closed_form(&p)) {
            (Ok(s), Ok(c)) => prop_assert_eq!(s, c),
            (Err(e), _) | (_, Err(e)) => prop_assert!(e.is_inadmissible(), "{e:?}"),
        }
    }

    #[test]
    fn raw_form_balances((u, v) in (1usize..=12).prop_flat_map(|n| (seq(n + 1), seq(n + 1)))) {
        let n = u.len() - 1;
        let (lhs, rhs) = raw_euler_sum(&SeqFn::from_values(0, u), &SeqFn::from_values(0, v), n).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn differences_telescope(f in (0usize..=12).prop_flat_map(|n| prop::collection::vec(rational(), n + 2))) {
        let n = f.len() - 2;
        let (boundary, sum) = sum_to_telescope(&SeqFn::from_values(0, f), n).unwrap();
        prop_assert_eq!(boundary, sum);
    }

    #[test]
    fn solver_matches_iteration(
        (b, c) in (0usize..=40).prop_flat_map(|n| (seq(n + 1), prop::collection::vec(rational(), n + 1))),
        x0 in rational(),
    ) {
        let n = b.len() - 1;
        let mut x = x0.clone();
        for m in 0..=n {
            x = &b[m] * &x + &c[m];
        }
        let got = solve_linear_recurrence(&SeqFn::from_values(0, b), &SeqFn::from_values(0, c), &x0, n).unwrap();
        prop_assert_eq!(got, x);
    }

    #[test]
    fn signed_products_extend(lo in -8i64..=8, hi in -8i64..=8, f in seq(40)) {
        let table = |j: i64| -> Result<Rational, ArithError> { Ok(f[(j + 20) as usize].clone()) };
        let left = prod_range(table, lo, hi - 1).unwrap();
        let whole = prod_range(table, lo, hi).unwrap();
        prop_assert_eq!(left * table(hi).unwrap(), whole);
    }

    #[test]
    fn six_identities_on_random_specs(a in seq(23), b in seq(23), x0 in nonzero(), x1 in nonzero()) {
        let spec = RecurrenceSpec::new("random", SeqFn::from_values(0, a), SeqFn::from_values(0, b), x0, x1);
        for which in 1..=6 {
            match lucas_gen_check(&spec, which, 10) {
                Ok(()) | Err(LucasError::Inadmissible { .. }) => {}
                Err(e) => prop_assert!(false, "identity {which}: {e:?}"),
            }
        }
    }

    #[test]
    fn sequence_sums_balance(a in seq(11), b in seq(11), c in seq(11), d in seq(11), n in 0i64..=9) {
        let mk = |v: &Vec<Rational>| SeqFn::from_values(0, v.clone());
        let p = SequenceParams::new(mk(&a), mk(&b)).with_c(mk(&c)).with_d(mk(&d));
        let skip = |e: &GenhypError| matches!(e, GenhypError::Inadmissible { .. });
        for kind in Macdonald::ALL {
            match macdonald_sides(kind, &p, n) {
                Ok((l, r)) => prop_assert_eq!(l, r, "{}", kind.id()),
                Err(e) => prop_assert!(skip(&e), "{e:?}"),
            }
        }
        for law in [relabeling_law(&p, n), d_zero_law(&p, n)] {
            match law {
                Ok(inner) => prop_assert!(inner.is_ok(), "{inner:?}"),
                Err(e) => prop_assert!(skip(&e), "{e:?}"),
            }
        }
    }

    #[test]
    fn terminating_rows_vanish_past_n(sample in 0u32..64, n in 0i64..=6) {
        for def in builtin_identities().into_iter().filter(|d| d.terminating) {
            let p = sample_params(&def.params, n, &mut sample_rng(5, &def.id, sample));
            for k in n + 1..=n + 3 {
                match def.summand(n, k, &p) {
                    Ok(t) => prop_assert!(t.is_zero(), "{} F({n}, {k}) = {t}", def.id),
                    Err(e) => prop_assert!(e.is_inadmissible(), "{e:?}"),
                }
            }
        }
    }

    #[test]
    fn corpus_rows_balance(sample in 0u32..64, n in 0i64..=8) {
        for def in builtin_identities() {
            let p = sample_params(&def.params, n, &mut sample_rng(9, &def.id, sample));
            match evaluate_identity(&def, n, &p) {
                Ok((l, r)) => prop_assert_eq!(l, r, "{}", def.id),
                Err(e) => prop_assert!(e.is_inadmissible(), "{}: {e:?}", def.id),
            }
        }
    }
}

#[test]
fn named_sequences_are_fibonacci_polynomials() {
    let f = fibonacci(30).generate(30).unwrap();
    assert_eq!(f, fibonacci_poly(&int(1), &int(1), 30).generate(30).unwrap());
    assert_eq!(pell(30).generate(30).unwrap(), fibonacci_poly(&int(2), &int(1), 30).generate(30).unwrap());
    assert_eq!(&f[..8], &[0, 1, 1, 2, 3, 5, 8, 13].map(int));
}

#[test]
fn chebyshev_from_fibonacci_polynomials() {
    // U_{k-1}(x) = F_k(2x, -1); U_0 = 1, U_1 = 2x, U_2 = 4x^2 - 1
    let x = Rational::new(3, 5).unwrap();
    let f = fibonacci_poly(&(int(2) * &x), &int(-1), 4).generate(4).unwrap();
    assert_eq!(f[1], int(1));
    assert_eq!(f[2], int(2) * &x);
    assert_eq!(f[3], int(4) * &x * &x - int(1));
}

#[test]
fn derangement_link_to_solver() {
    let shifted = shifted_derangement(22).generate(20).unwrap();
    for n in 0..=20usize {
        let b = SeqFn::from_fn_total(0, n as i64 + 1, int);
        let c = SeqFn::from_fn_total(0, n as i64 + 1, Rational::sign_power);
        // x_{m+1} = d_m, so d_{n+1} = solve(.., n + 1)
        let d = solve_linear_recurrence(&b, &c, &int(0), n + 1).unwrap();
        assert_eq!(shifted[n], d, "n = {n}");
    }
}

#[test]
fn parameter_free_families_hold_to_twenty() {
    for name in ["fibonacci", "pell", "derangement"] {
        let fam = family(name).unwrap();
        let outcomes = family_outcomes(&fam, 20, &Params::new()).unwrap();
        assert!(outcomes.iter().all(Result::is_ok), "{name}: {outcomes:?}");
    }
}

#[test]
fn zero_denominator_is_typed() {
    let p = TelescopeProblem::new(SeqFn::from_values(0, vec![int(1), int(2)]), SeqFn::from_values(0, vec![int(1), int(3)]), 1)
        .unwrap();
    assert!(matches!(telescoping_sum(&p), Err(ref e) if e.is_inadmissible()));
    let _: &EvalError = &telescoping_closed_form(&p).unwrap_err();
}
