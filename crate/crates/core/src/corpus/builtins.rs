use std::sync::Arc;

use super::{q_rising_factorial as qrf, rising_factorial as rf, Certificate, IdentityDef};
use crate::arith::Rational;
use crate::error::EvalError;
use crate::params::{ParamSpec, Params};

const CLASSICAL_N_MAX: i64 = 15;
const Q_N_MAX: i64 = 12;

type R = Result<Rational, EvalError>;

fn one() -> Rational {
    Rational::one()
}

fn int(n: i64) -> Rational {
    Rational::from(n)
}

fn factorial(k: i64) -> Rational {
    rf(&one(), k)
}

fn sign(k: i64) -> Rational {
    Rational::sign_power(k)
}

fn from_zero(n: i64, _: &Params) -> Result<(i64, i64), EvalError> {
    Ok((0, n))
}

fn from_one(n: i64, _: &Params) -> Result<(i64, i64), EvalError> {
    Ok((1, n))
}

struct Row {
    id: &'static str,
    citation: &'static str,
    params: Vec<ParamSpec>,
    n_max: i64,
    lower: i64,
    terminating: bool,
}

fn build(
    row: Row,
    summand: impl Fn(i64, i64, &Params) -> R + Send + Sync + 'static,
    rhs: impl Fn(i64, &Params) -> R + Send + Sync + 'static,
    certificate: Option<Certificate>,
) -> IdentityDef {
    IdentityDef {
        id: row.id.to_string(),
        citation: row.citation.to_string(),
        params: row.params,
        n_max: row.n_max,
        range: if row.lower == 0 { Arc::new(from_zero) } else { Arc::new(from_one) },
        summand: Arc::new(summand),
        rhs: Arc::new(rhs),
        certificate,
        guard: None,
        terminating: row.terminating,
    }
}

fn cert(
    u: impl Fn(i64, i64, &Params) -> R + Send + Sync + 'static,
    v: impl Fn(i64, i64, &Params) -> R + Send + Sync + 'static,
) -> Option<Certificate> {
    Some(Certificate { u: Arc::new(u), v: Arc::new(v) })
}

fn get(p: &Params, name: &str) -> R {
    p.get(name).cloned()
}

/// Every built-in summation identity, in a fixed order.
pub fn builtin_identities() -> Vec<IdentityDef> {
    vec![
        geometric(),
        rising_fact_sum(),
        reciprocal_rising_fact_sum(),
        ramanujan_entry25(),
        binomial_x1(),
        binomial(),
        chu_vandermonde(),
        pfaff_saalschutz(),
        q_binomial(),
        q_chu_vandermonde(),
        q_pfaff_saalschutz(),
        q_dougall(),
        rogers_6phi5(),
    ]
}

fn geometric() -> IdentityDef {
    let row = Row {
        id: "geometric",
        citation: "geometric sum, sum_{k=0}^n x^k = (x^{n+1}-1)/(x-1)",
        params: vec![ParamSpec::free("x")],
        n_max: CLASSICAL_N_MAX,
        lower: 0,
        terminating: false,
    };
    build(
        row,
        |_, k, p| Ok(get(p, "x")?.pow(k)?),
        |n, p| {
            let x = get(p, "x")?;
            Ok((x.pow(n + 1)? - one()).checked_div(&(x - one()))?)
        },
        None,
    )
}

fn rising_fact_sum() -> IdentityDef {
    let row = Row {
        id: "rising_fact_sum",
        citation: "sum_{k=1}^n (k)_m = (n)_{m+1}/(m+1)",
        params: vec![ParamSpec::natural("m", 0, 6)],
        n_max: CLASSICAL_N_MAX,
        lower: 1,
        terminating: false,
    };
    build(row, |_, k, p| Ok(rf(&int(k), p.int("m")?)), |n, p| {
        let m = p.int("m")?;
        Ok(rf(&int(n), m + 1).checked_div(&int(m + 1))?)
    }, None)
}

fn reciprocal_rising_fact_sum() -> IdentityDef {
    let row = Row {
        id: "reciprocal_rising_fact_sum",
        citation: "sum_{k=1}^n 1/(k)_{m+1} = (1/m)(1/m! - 1/(n+1)_m)",
        params: vec![ParamSpec::natural("m", 1, 6)],
        n_max: CLASSICAL_N_MAX,
        lower: 1,
        terminating: false,
    };
    build(row, |_, k, p| Ok(rf(&int(k), p.int("m")? + 1).recip()?), |n, p| {
        let m = p.int("m")?;
        let inner = factorial(m).recip()? - rf(&int(n + 1), m).recip()?;
        Ok(inner.checked_div(&int(m))?)
    }, None)
}

fn ramanujan_entry25() -> IdentityDef {
    let row = Row {
        id: "ramanujan_entry25",
        citation: "sum_{k=0}^n a_1..a_k/((x+a_1)..(x+a_{k+1})) = 1/x - a_1..a_{n+1}/(x(x+a_1)..(x+a_{n+1}))",
        params: vec![ParamSpec::free("x"), ParamSpec::sequence("a", 1, 1)],
        n_max: CLASSICAL_N_MAX,
        lower: 0,
        terminating: false,
    };
    build(
        row,
        |_, k, p| {
            let (x, a) = (get(p, "x")?, p.seq("a")?);
            let num = a.product(1, k)?;
            let den = (1..=k + 1).map(|j| Ok(&x + a.get(j)?)).product::<R>()?;
            Ok(num.checked_div(&den)?)
        },
        |n, p| {
            let (x, a) = (get(p, "x")?, p.seq("a")?);
            let num = a.product(1, n + 1)?;
            let den = &x * (1..=n + 1).map(|j| Ok(&x + a.get(j)?)).product::<R>()?;
            Ok(x.recip()? - num.checked_div(&den)?)
        },
        None,
    )
}

fn binomial_x1() -> IdentityDef {
    let row = Row {
        id: "binomial_x1",
        citation: "sum_k (-1)^k (-n)_k / k! = 2^n",
        params: vec![],
        n_max: CLASSICAL_N_MAX,
        lower: 0,
        terminating: true,
    };
    build(
        row,
        |n, k, _| Ok((sign(k) * rf(&int(-n), k)).checked_div(&factorial(k))?),
        |n, _| Ok(int(2).pow(n)?),
        cert(|n, k, _| Ok(int(n - k + 1)), |_, k, _| Ok(int(k))),
    )
}

fn binomial() -> IdentityDef {
    let row = Row {
        id: "binomial",
        citation: "binomial theorem, sum_k (-1)^k (-n)_k x^k / k! = (1+x)^n",
        params: vec![ParamSpec::free("x")],
        n_max: CLASSICAL_N_MAX,
        lower: 0,
        terminating: true,
    };
    build(
        row,
        |n, k, p| {
            let x = get(p, "x")?;
            Ok((sign(k) * rf(&int(-n), k) * x.pow(k)?).checked_div(&factorial(k))?)
        },
        |n, p| Ok((one() + get(p, "x")?).pow(n)?),
        cert(|n, k, p| Ok(get(p, "x")? * int(n - k + 1)), |_, k, _| Ok(int(k))),
    )
}

fn chu_vandermonde() -> IdentityDef {
    let row = Row {
        id: "chu_vandermonde",
        citation: "Chu-Vandermonde, sum_k (a)_k (-n)_k / ((b)_k k!) = (b-a)_n/(b)_n",
        params: vec![ParamSpec::free("a"), ParamSpec::free("b")],
        n_max: CLASSICAL_N_MAX,
        lower: 0,
        terminating: true,
    };
    build(
        row,
        |n, k, p| {
            let (a, b) = (get(p, "a")?, get(p, "b")?);
            Ok((rf(&a, k) * rf(&int(-n), k)).checked_div(&(rf(&b, k) * factorial(k)))?)
        },
        |n, p| {
            let (a, b) = (get(p, "a")?, get(p, "b")?);
            Ok(rf(&(&b - &a), n).checked_div(&rf(&b, n))?)
        },
        cert(
            |n, k, p| Ok((get(p, "a")? + int(k)) * int(k - n - 1)),
            |_, k, p| Ok(int(k) * (get(p, "b")? + int(k - 1))),
        ),
    )
}

fn pfaff_saalschutz() -> IdentityDef {
    let row = Row {
        id: "pfaff_saalschutz",
        citation: "Pfaff-Saalschutz, sum_k (a)_k (b)_k (-n)_k / ((c)_k (1-n+a+b-c)_k k!) = (c-a)_n (c-b)_n / ((c)_n (c-a-b)_n)",
        params: vec![ParamSpec::free("a"), ParamSpec::free("b"), ParamSpec::free("c")],
        n_max: CLASSICAL_N_MAX,
        lower: 0,
        terminating: true,
    };
    build(
        row,
        |n, k, p| {
            let (a, b, c) = (get(p, "a")?, get(p, "b")?, get(p, "c")?);
            let d = int(1 - n) + &a + &b - &c;
            let num = rf(&a, k) * rf(&b, k) * rf(&int(-n), k);
            Ok(num.checked_div(&(rf(&c, k) * rf(&d, k) * factorial(k)))?)
        },
        |n, p| {
            let (a, b, c) = (get(p, "a")?, get(p, "b")?, get(p, "c")?);
            let num = rf(&(&c - &a), n) * rf(&(&c - &b), n);
            Ok(num.checked_div(&(rf(&c, n) * rf(&(&c - &a - &b), n)))?)
        },
        cert(
            |n, k, p| Ok((get(p, "a")? + int(k)) * (get(p, "b")? + int(k)) * int(k - n - 1)),
            |n, k, p| {
                let (a, b, c) = (get(p, "a")?, get(p, "b")?, get(p, "c")?);
                Ok(int(k) * (&c + int(k - 1)) * (int(k - n) + a + b - c))
            },
        ),
    )
}

fn q_binomial() -> IdentityDef {
    let row = Row {
        id: "q_binomial",
        citation: "terminating q-binomial sum, sum_k (q^-n;q)_k/(q;q)_k (z q^n)^k = (z;q)_n",
        params: vec![ParamSpec::free("z"), ParamSpec::base("q")],
        n_max: Q_N_MAX,
        lower: 0,
        terminating: true,
    };
    build(
        row,
        |n, k, p| {
            let (z, q) = (get(p, "z")?, get(p, "q")?);
            let num = qrf(&q.pow(-n)?, &q, k) * (z * q.pow(n)?).pow(k)?;
            Ok(num.checked_div(&qrf(&q, &q, k))?)
        },
        |n, p| Ok(qrf(&get(p, "z")?, &get(p, "q")?, n)),
        cert(
            |n, k, p| {
                let (z, q) = (get(p, "z")?, get(p, "q")?);
                Ok(z * q.pow(n)? * (one() - q.pow(k - n - 1)?))
            },
            |_, k, p| Ok(one() - get(p, "q")?.pow(k)?),
        ),
    )
}

fn q_chu_vandermonde() -> IdentityDef {
    let row = Row {
        id: "q_chu_vandermonde",
        citation: "q-Chu-Vandermonde, sum_k (a;q)_k (q^-n;q)_k / ((b;q)_k (q;q)_k) (b q^n/a)^k = (b/a;q)_n/(b;q)_n",
        params: vec![ParamSpec::free("a"), ParamSpec::free("b"), ParamSpec::base("q")],
        n_max: Q_N_MAX,
        lower: 0,
        terminating: true,
    };
    build(
        row,
        |n, k, p| {
            let (a, b, q) = (get(p, "a")?, get(p, "b")?, get(p, "q")?);
            let z = (&b * q.pow(n)?).checked_div(&a)?;
            let num = qrf(&a, &q, k) * qrf(&q.pow(-n)?, &q, k) * z.pow(k)?;
            Ok(num.checked_div(&(qrf(&b, &q, k) * qrf(&q, &q, k)))?)
        },
        |n, p| {
            let (a, b, q) = (get(p, "a")?, get(p, "b")?, get(p, "q")?);
            Ok(qrf(&b.checked_div(&a)?, &q, n).checked_div(&qrf(&b, &q, n))?)
        },
        cert(
            |n, k, p| {
                let (a, b, q) = (get(p, "a")?, get(p, "b")?, get(p, "q")?);
                let z = (&b * q.pow(n)?).checked_div(&a)?;
                Ok((one() - &a * q.pow(k)?) * (one() - q.pow(k - n - 1)?) * z)
            },
            |_, k, p| {
                let (b, q) = (get(p, "b")?, get(p, "q")?);
                Ok((one() - b * q.pow(k - 1)?) * (one() - q.pow(k)?))
            },
        ),
    )
}

fn q_pfaff_saalschutz() -> IdentityDef {
    let row = Row {
        id: "q_pfaff_saalschutz",
        citation: "q-Pfaff-Saalschutz, sum_k (a,b,q^-n;q)_k / ((c, abq^{1-n}/c, q;q)_k) q^k = (c/a, c/b;q)_n / ((c, c/ab;q)_n)",
        params: vec![ParamSpec::free("a"), ParamSpec::free("b"), ParamSpec::free("c"), ParamSpec::base("q")],
        n_max: Q_N_MAX,
        lower: 0,
        terminating: true,
    };
    build(
        row,
        |n, k, p| {
            let (a, b, c, q) = (get(p, "a")?, get(p, "b")?, get(p, "c")?, get(p, "q")?);
            let e = (&a * &b * q.pow(1 - n)?).checked_div(&c)?;
            let num = qrf(&a, &q, k) * qrf(&b, &q, k) * qrf(&q.pow(-n)?, &q, k) * q.pow(k)?;
            Ok(num.checked_div(&(qrf(&c, &q, k) * qrf(&e, &q, k) * qrf(&q, &q, k)))?)
        },
        |n, p| {
            let (a, b, c, q) = (get(p, "a")?, get(p, "b")?, get(p, "c")?, get(p, "q")?);
            let num = qrf(&c.checked_div(&a)?, &q, n) * qrf(&c.checked_div(&b)?, &q, n);
            let den = qrf(&c, &q, n) * qrf(&c.checked_div(&(&a * &b))?, &q, n);
            Ok(num.checked_div(&den)?)
        },
        cert(
            |n, k, p| {
                let (a, b, q) = (get(p, "a")?, get(p, "b")?, get(p, "q")?);
                let qk = q.pow(k)?;
                Ok((one() - a * &qk) * (one() - b * &qk) * (one() - q.pow(k - n - 1)?))
            },
            |n, k, p| {
                let (a, b, c, q) = (get(p, "a")?, get(p, "b")?, get(p, "c")?, get(p, "q")?);
                let e = (a * b * q.pow(k - n)?).checked_div(&c)?;
                Ok((one() - c * q.pow(k - 1)?) * (one() - e) * (one() - q.pow(k)?))
            },
        ),
    )
}

struct Dougall {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
    q: Rational,
}

impl Dougall {
    fn from(p: &Params) -> Result<Self, EvalError> {
        Ok(Dougall { a: get(p, "a")?, b: get(p, "b")?, c: get(p, "c")?, d: get(p, "d")?, q: get(p, "q")? })
    }

    fn bcd(&self) -> Rational {
        &self.b * &self.c * &self.d
    }

    /// `aq/x`
    fn aq_over(&self, x: &Rational) -> R {
        Ok((&self.a * &self.q).checked_div(x)?)
    }
}

fn q_dougall() -> IdentityDef {
    let row = Row {
        id: "q_dougall",
        citation: "q-Dougall 8phi7, summand (1-aq^{2k})/(1-a) (a,b,c,d,a^2q^{n+1}/bcd,q^-n;q)_k / (aq/b,aq/c,aq/d,bcdq^-n/a,aq^{n+1},q;q)_k q^k",
        params: ["a", "b", "c", "d"].iter().map(|s| ParamSpec::free(s)).chain([ParamSpec::base("q")]).collect(),
        n_max: 8,
        lower: 0,
        terminating: true,
    };
    build(
        row,
        |n, k, p| {
            let g = Dougall::from(p)?;
            let (a, q) = (&g.a, &g.q);
            let e = (a * a * q.pow(n + 1)?).checked_div(&g.bcd())?;
            let f = (g.bcd() * q.pow(-n)?).checked_div(a)?;
            let poised = (one() - a * q.pow(2 * k)?).checked_div(&(one() - a))?;
            let num = [a.clone(), g.b.clone(), g.c.clone(), g.d.clone(), e, q.pow(-n)?]
                .iter()
                .map(|x| qrf(x, q, k))
                .product::<Rational>();
            let den = [g.aq_over(&g.b)?, g.aq_over(&g.c)?, g.aq_over(&g.d)?, f, a * q.pow(n + 1)?, q.clone()]
                .iter()
                .map(|x| qrf(x, q, k))
                .product::<Rational>();
            Ok(poised * num.checked_div(&den)? * q.pow(k)?)
        },
        |n, p| {
            let g = Dougall::from(p)?;
            let q = &g.q;
            let aq = &g.a * q;
            let num = [aq.clone(), g.aq_over(&(&g.b * &g.c))?, g.aq_over(&(&g.b * &g.d))?, g.aq_over(&(&g.c * &g.d))?]
                .iter()
                .map(|x| qrf(x, q, n))
                .product::<Rational>();
            let den = [g.aq_over(&g.b)?, g.aq_over(&g.c)?, g.aq_over(&g.d)?, g.aq_over(&g.bcd())?]
                .iter()
                .map(|x| qrf(x, q, n))
                .product::<Rational>();
            Ok(num.checked_div(&den)?)
        },
        cert(
            |n, k, p| {
                let g = Dougall::from(p)?;
                let (a, q) = (&g.a, &g.q);
                let qk = q.pow(k)?;
                let e = (a * a * q.pow(n + k + 1)?).checked_div(&g.bcd())?;
                Ok([a * &qk, &g.b * &qk, &g.c * &qk, &g.d * &qk, e, q.pow(k - n - 1)?]
                    .iter()
                    .map(|x| one() - x)
                    .product())
            },
            |n, k, p| {
                let g = Dougall::from(p)?;
                let (a, q) = (&g.a, &g.q);
                let aqk = a * q.pow(k)?;
                let f = (g.bcd() * q.pow(k - n - 1)?).checked_div(a)?;
                Ok([aqk.checked_div(&g.b)?, aqk.checked_div(&g.c)?, aqk.checked_div(&g.d)?, f, a * q.pow(n + k + 1)?, q.pow(k)?]
                    .iter()
                    .map(|x| one() - x)
                    .product())
            },
        ),
    )
}

fn rogers_6phi5() -> IdentityDef {
    let row = Row {
        id: "rogers_6phi5",
        citation: "Rogers terminating very-well-poised 6phi5, summand (1-aq^{2k})/(1-a) (a,b,c,q^-n;q)_k / (aq/b,aq/c,aq^{n+1},q;q)_k (aq^{n+1}/bc)^k",
        params: ["a", "b", "c"].iter().map(|s| ParamSpec::free(s)).chain([ParamSpec::base("q")]).collect(),
        n_max: 10,
        lower: 0,
        terminating: true,
    };
    fn z(n: i64, a: &Rational, b: &Rational, c: &Rational, q: &Rational) -> R {
        Ok((a * q.pow(n + 1)?).checked_div(&(b * c))?)
    }
    build(
        row,
        |n, k, p| {
            let (a, b, c, q) = (get(p, "a")?, get(p, "b")?, get(p, "c")?, get(p, "q")?);
            let poised = (one() - &a * q.pow(2 * k)?).checked_div(&(one() - &a))?;
            let aq = &a * &q;
            let num = qrf(&a, &q, k) * qrf(&b, &q, k) * qrf(&c, &q, k) * qrf(&q.pow(-n)?, &q, k);
            let den = qrf(&aq.checked_div(&b)?, &q, k)
                * qrf(&aq.checked_div(&c)?, &q, k)
                * qrf(&(&a * q.pow(n + 1)?), &q, k)
                * qrf(&q, &q, k);
            Ok(poised * num.checked_div(&den)? * z(n, &a, &b, &c, &q)?.pow(k)?)
        },
        |n, p| {
            let (a, b, c, q) = (get(p, "a")?, get(p, "b")?, get(p, "c")?, get(p, "q")?);
            let aq = &a * &q;
            let num = qrf(&aq, &q, n) * qrf(&aq.checked_div(&(&b * &c))?, &q, n);
            let den = qrf(&aq.checked_div(&b)?, &q, n) * qrf(&aq.checked_div(&c)?, &q, n);
            Ok(num.checked_div(&den)?)
        },
        cert(
            |n, k, p| {
                let (a, b, c, q) = (get(p, "a")?, get(p, "b")?, get(p, "c")?, get(p, "q")?);
                let qk = q.pow(k)?;
                let f = (one() - &a * &qk) * (one() - &b * &qk) * (one() - &c * &qk) * (one() - q.pow(k - n - 1)?);
                Ok(f * z(n, &a, &b, &c, &q)?)
            },
            |n, k, p| {
                let (a, b, c, q) = (get(p, "a")?, get(p, "b")?, get(p, "c")?, get(p, "q")?);
                let aqk = &a * q.pow(k)?;
                Ok((one() - aqk.checked_div(&b)?)
                    * (one() - aqk.checked_div(&c)?)
                    * (one() - &a * q.pow(n + k + 1)?)
                    * (one() - q.pow(k)?))
            },
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{evaluate_identity, lookup};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn ids_are_unique() {
        let ids: Vec<String> = builtin_identities().into_iter().map(|d| d.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
    }

    #[test]
    fn chu_vandermonde_hand_value() {
        let d = lookup("chu_vandermonde").unwrap();
        let p = Params::new().with("a", 1).with("b", 3);
        assert_eq!(evaluate_identity(&d, 2, &p).unwrap(), (r(1, 2), r(1, 2)));
    }

    #[test]
    fn q_binomial_first_row() {
        let d = lookup("q_binomial").unwrap();
        let (z, q) = (r(-5, 11), r(3, 7));
        let p = Params::new().with("z", z.clone()).with("q", q);
        let expected = Rational::one() - z;
        assert_eq!(evaluate_identity(&d, 1, &p).unwrap(), (expected.clone(), expected));
    }

    #[test]
    fn q_binomial_degenerate_rows_vanish() {
        // z = q^{-2} makes (z;q)_n vanish for every n ≥ 3
        let d = lookup("q_binomial").unwrap();
        let q = r(2, 5);
        let p = Params::new().with("z", q.pow(-2).unwrap()).with("q", q);
        for n in 3..8 {
            let (lhs, rhs) = evaluate_identity(&d, n, &p).unwrap();
            assert!(lhs.is_zero() && rhs.is_zero(), "n={n}");
        }
    }

    #[test]
    fn ramanujan_hand_value() {
        let d = lookup("ramanujan_entry25").unwrap();
        let a = crate::telescope::SeqFn::constant(Rational::one(), 1, 2);
        let p = Params::new().with("x", 1).with_seq("a", a);
        assert_eq!(evaluate_identity(&d, 1, &p).unwrap(), (r(3, 4), r(3, 4)));
    }

    #[test]
    fn rising_fact_sum_hand_value() {
        let d = lookup("rising_fact_sum").unwrap();
        let p = Params::new().with("m", 2);
        assert_eq!(evaluate_identity(&d, 4, &p).unwrap(), (r(40, 1), r(40, 1)));
    }

    #[test]
    fn reciprocal_sum_hand_value() {
        // m = 1: sum 1/(k(k+1)) = 1 - 1/(n+1)
        let d = lookup("reciprocal_rising_fact_sum").unwrap();
        let p = Params::new().with("m", 1);
        assert_eq!(evaluate_identity(&d, 3, &p).unwrap(), (r(3, 4), r(3, 4)));
    }

    #[test]
    fn q_dougall_spot_point() {
        let d = lookup("q_dougall").unwrap();
        let p = Params::new().with("q", r(2, 3)).with("a", 5).with("b", 2).with("c", 3).with("d", 7);
        for n in 0..=4 {
            let (l, rr) = evaluate_identity(&d, n, &p).unwrap();
            assert_eq!(l, rr, "n={n}");
        }
    }
}
