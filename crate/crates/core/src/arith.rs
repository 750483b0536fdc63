//! Exact rational arithmetic and the signed-range product convention.
//!
//! [`Rational`] is the scalar every other module computes in. Division and
//! negative powers are fallible: a zero divisor is reported as
//! [`ArithError::DivisionByZero`] so callers can treat the evaluation point as
//! inadmissible instead of aborting.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent {0} is out of range")]
    ExponentOutOfRange(i64),
}

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Builds `numer / denom`, reduced.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ArithError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// The value as an `i64` when it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Integer power; negative exponents invert first and need a nonzero base.
    pub fn pow(&self, exp: i64) -> Result<Self, ArithError> {
        let magnitude = u32::try_from(exp.unsigned_abs()).map_err(|_| ArithError::ExponentOutOfRange(exp))?;
        if exp < 0 {
            Ok(Rational(Pow::pow(self.recip()?.0, magnitude)))
        } else {
            Ok(Rational(Pow::pow(&self.0, magnitude)))
        }
    }

    /// `(-1)^exp` as a rational.
    pub fn sign_power(exp: i64) -> Self {
        if exp.is_even() {
            Rational::one()
        } else {
            -Rational::one()
        }
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $assign_trait<Rational> for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                self.0.$assign_method(rhs.0);
            }
        }
        impl<'a> $assign_trait<&'a Rational> for Rational {
            fn $assign_method(&mut self, rhs: &'a Rational) {
                self.0.$assign_method(&rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl std::iter::Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

/// `"num/den"`, or just `"num"` for integers.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                let d: BigInt = d.trim().parse().map_err(|_| err())?;
                Rational::new(n, d).map_err(|_| err())
            }
            None => s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| err()),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Index bounds of a product `∏_{j=lo}^{hi} f(j)`.
///
/// `hi >= lo` is the ordinary product, `hi == lo - 1` is empty (1), and
/// `hi <= lo - 2` is the reciprocal of the product over `hi+1 ..= lo-1`.
/// With this convention `prod(lo, m-1) * f(m) == prod(lo, m)` for every `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductRange {
    pub lo: i64,
    pub hi: i64,
}

impl ProductRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        ProductRange { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo - 1
    }

    pub fn is_inverted(&self) -> bool {
        self.hi <= self.lo - 2
    }

    pub fn eval<F, E>(&self, f: F) -> Result<Rational, E>
    where
        F: FnMut(i64) -> Result<Rational, E>,
        E: From<ArithError>,
    {
        prod_range(f, self.lo, self.hi)
    }
}

/// Product of `f(j)` over a signed index range (see [`ProductRange`]).
pub fn prod_range<F, E>(mut f: F, lo: i64, hi: i64) -> Result<Rational, E>
where
    F: FnMut(i64) -> Result<Rational, E>,
    E: From<ArithError>,
{
    if hi >= lo - 1 {
        let mut acc = Rational::one();
        for j in lo..=hi {
            acc *= f(j)?;
        }
        Ok(acc)
    } else {
        let mut acc = Rational::one();
        for j in (hi + 1)..lo {
            acc *= f(j)?;
        }
        Ok(acc.recip()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn fraction_addition() {
        assert_eq!(r(2, 3) + r(1, 6), r(5, 6));
    }

    #[test]
    fn negative_power() {
        assert_eq!(Rational::from(2).pow(-3).unwrap(), r(1, 8));
        assert_eq!(Rational::zero().pow(-1), Err(ArithError::DivisionByZero));
        assert_eq!(Rational::zero().pow(0).unwrap(), Rational::one());
    }

    #[test]
    fn inverse_pair() {
        assert_eq!(r(3, 5) * r(5, 3), Rational::one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(r(1, 2).checked_div(&Rational::zero()), Err(ArithError::DivisionByZero));
        assert_eq!(Rational::new(1, 0), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn canonical_form_and_display() {
        let x = r(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(x.to_string(), "-3/2");
        assert_eq!(r(-10, 2).to_string(), "-5");
        assert_eq!(Rational::zero().denom(), &BigInt::from(1));
        assert_eq!("-5/8".parse::<Rational>().unwrap(), r(-5, 8));
        assert_eq!("12".parse::<Rational>().unwrap(), Rational::from(12));
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn empty_product_is_one() {
        let p: Result<_, ArithError> = prod_range(|_| Ok(Rational::from(7)), 1, 0);
        assert_eq!(p.unwrap(), Rational::one());
    }

    #[test]
    fn inverted_product_is_reciprocal() {
        let p: Result<_, ArithError> = prod_range(|j| Ok(if j == 0 { Rational::from(5) } else { Rational::from(99) }), 1, -1);
        assert_eq!(p.unwrap(), r(1, 5));
    }

    #[test]
    fn forward_product() {
        let p: Result<_, ArithError> = prod_range(|j| Ok(Rational::from(j)), 2, 5);
        assert_eq!(p.unwrap(), Rational::from(120));
    }

    #[test]
    fn inverted_product_over_zero_factor_fails() {
        let p: Result<_, ArithError> = prod_range(|j| Ok(Rational::from(j)), 2, -1);
        assert_eq!(p, Err(ArithError::DivisionByZero));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-50i64..=50, 1i64..=50).prop_map(|(n, d)| r(n, d))
    }

    proptest! {
        #[test]
        fn results_are_canonical(a in small_rational(), b in small_rational()) {
            for x in [&a + &b, &a - &b, &a * &b] {
                prop_assert!(x.denom() > &BigInt::zero());
                prop_assert!(x.numer().gcd(x.denom()).is_one() || x.is_zero());
            }
        }

        #[test]
        fn field_axioms(a in small_rational(), b in small_rational(), c in small_rational()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            if !b.is_zero() {
                prop_assert_eq!(a.checked_div(&b).unwrap() * &b, a.clone());
            }
        }

        #[test]
        fn display_round_trips(a in small_rational()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }

    fn nonzero_rational() -> impl Strategy<Value = Rational> {
        (1i64..=40, 1i64..=40, any::<bool>()).prop_map(|(n, d, neg)| r(if neg { -n } else { n }, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn extension_law_on_grid(table in proptest::collection::vec(nonzero_rational(), 17)) {
            let f = |j: i64| -> Result<Rational, ArithError> { Ok(table[(j + 8) as usize].clone()) };
            for lo in -8..=8i64 {
                for m in -7..=8i64 {
                    let before = prod_range(f, lo, m - 1).unwrap();
                    let after = prod_range(f, lo, m).unwrap();
                    prop_assert_eq!(before * f(m).unwrap(), after, "lo={} m={}", lo, m);
                }
            }
        }
    }
}
