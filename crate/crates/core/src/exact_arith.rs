//! Exact rationals, quadratic discriminants and the Kronecker symbol.
//!
//! Nothing in here rounds. Rationals are kept in lowest terms after every
//! operation; integers that can grow with the input are `BigInt`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest discriminant magnitude accepted anywhere.
///
/// Form enumeration multiplies coefficients bounded by `|D|`, so this keeps
/// every intermediate of the enumeration inside `i64`. Enumerating anywhere
/// near this bound is computationally out of reach anyway.
pub const MAX_DISCRIMINANT: i64 = 1 << 60;

/// Largest prime accepted where a prime enters a discriminant; keeps
/// `12 p` (the discriminant of `Q(sqrt -3p)` at worst) within range.
pub const MAX_PRIME: u64 = (MAX_DISCRIMINANT / 12) as u64;

/// Arbitrary-precision rational number in lowest terms with a positive
/// denominator.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    /// `numerator / denominator`, reduced. A zero denominator is a domain error.
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Result<Self> {
        let den = denominator.into();
        if den.is_zero() {
            return Err(Error::domain("rational with zero denominator"));
        }
        Ok(ExactRational(BigRational::new(numerator.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// The value as an integer; a fractional value is an integrality failure
    /// attributed to `what`.
    pub fn to_integer(&self, what: &str) -> Result<BigInt> {
        if self.is_integer() {
            Ok(self.0.numer().clone())
        } else {
            Err(Error::integrality(format!(
                "{what} evaluated to {self}, not an integer"
            )))
        }
    }

    /// The value as a positive machine integer (class numbers and friends).
    pub fn to_positive_u64(&self, what: &str) -> Result<u64> {
        let n = self.to_integer(what)?;
        match n.to_u64() {
            Some(v) if v > 0 => Ok(v),
            _ => Err(Error::integrality(format!(
                "{what} evaluated to {n}, not a positive integer"
            ))),
        }
    }

    /// Division that reports a zero divisor instead of panicking.
    pub fn checked_div(&self, rhs: &ExactRational) -> Option<ExactRational> {
        if rhs.is_zero() {
            None
        } else {
            Some(ExactRational(&self.0 / &rhs.0))
        }
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }
}

impl fmt::Display for ExactRational {
    /// Always `num/den`, including integers (`5/1`), so output parses uniformly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("malformed rational {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                ExactRational::new(n, d)
            }
            None => Ok(ExactRational::from_integer(
                s.parse::<BigInt>().map_err(|_| bad())?,
            )),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        ExactRational::from_integer(n)
    }
}

impl From<u64> for ExactRational {
    fn from(n: u64) -> Self {
        ExactRational::from_integer(n)
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        ExactRational::from_integer(n)
    }
}

impl From<&BigInt> for ExactRational {
    fn from(n: &BigInt) -> Self {
        ExactRational::from_integer(n.clone())
    }
}

/// `n / d` for small literals. Panics on `d == 0`; only for constants.
pub fn ratio(n: i64, d: i64) -> ExactRational {
    assert!(d != 0, "ratio with zero denominator");
    ExactRational(BigRational::new(n.into(), d.into()))
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational($tr::$method(&self.0, &rhs.0))
            }
        }
        impl $tr<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational($tr::$method(self.0, rhs.0))
            }
        }
        impl $tr<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational($tr::$method(self.0, &rhs.0))
            }
        }
        impl $tr<ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational($tr::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Division by zero panics, as it does for the primitive numeric types.
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a ExactRational> for ExactRational {
    fn sum<I: Iterator<Item = &'a ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

/// Discriminant of a quadratic order or field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Discriminant {
    value: i64,
    is_fundamental: bool,
}

impl Discriminant {
    /// Any nonzero integer congruent to 0 or 1 mod 4 with `|value| <= MAX_DISCRIMINANT`.
    pub fn new(value: i64) -> Result<Self> {
        if value == 0 {
            return Err(Error::domain("discriminant must be nonzero"));
        }
        if value.unsigned_abs() > MAX_DISCRIMINANT as u64 {
            return Err(Error::domain(format!(
                "discriminant {value} exceeds the supported magnitude 2^60"
            )));
        }
        if !matches!(value.rem_euclid(4), 0 | 1) {
            return Err(Error::domain(format!(
                "{value} is not congruent to 0 or 1 mod 4"
            )));
        }
        Ok(Discriminant {
            value,
            is_fundamental: is_fundamental_value(value),
        })
    }

    /// Like [`Discriminant::new`] but additionally requires a fundamental discriminant.
    pub fn fundamental(value: i64) -> Result<Self> {
        let d = Discriminant::new(value)?;
        if !d.is_fundamental {
            return Err(Error::domain(format!(
                "{value} is not a fundamental discriminant"
            )));
        }
        Ok(d)
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn is_fundamental(&self) -> bool {
        self.is_fundamental
    }

    pub fn is_negative(&self) -> bool {
        self.value < 0
    }

    /// Writes `D = f^2 * D0` with `D0` fundamental. Perfect squares have no
    /// field behind them and are rejected.
    pub fn fundamental_part(&self) -> Result<(Discriminant, u64)> {
        if self.value > 0 && is_square(self.value as u64) {
            return Err(Error::domain(format!("{} is a perfect square", self.value)));
        }
        let sign = self.value.signum();
        let mut core = 1i64;
        let mut f = 1u64;
        for (l, e) in factorize(self.value.unsigned_abs()) {
            if e % 2 == 1 {
                core *= l as i64;
            }
            f *= l.pow(e / 2);
        }
        let m = sign * core;
        let d0 = if m.rem_euclid(4) == 1 {
            m
        } else {
            f /= 2;
            4 * m
        };
        Ok((Discriminant::fundamental(d0)?, f))
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn is_fundamental_value(value: i64) -> bool {
    if value == 1 {
        return false;
    }
    match value.rem_euclid(4) {
        1 => is_squarefree(value),
        0 => {
            let m = value / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Discriminant of `Q(sqrt(d))` for squarefree `d` not in {0, 1}.
pub fn discriminant_of_field(d: i64) -> Result<Discriminant> {
    if d == 0 || d == 1 {
        return Err(Error::domain(format!(
            "Q(sqrt({d})) is not a quadratic field"
        )));
    }
    if !is_squarefree(d) {
        return Err(Error::domain(format!("{d} is not squarefree")));
    }
    let value = if d.rem_euclid(4) == 1 {
        d
    } else {
        d.checked_mul(4)
            .ok_or_else(|| Error::domain(format!("discriminant of Q(sqrt({d})) out of range")))?
    };
    Discriminant::fundamental(value)
}

/// Kronecker symbol `(a/n)`.
///
/// Extends the Jacobi symbol with `(a/2) = 0, 1, -1` for `a` even, `a = ±1
/// mod 8`, `a = ±3 mod 8`, and `(a/-1) = sign(a)`. `n = 0` is rejected.
pub fn kronecker_symbol(a: &BigInt, n: &BigInt) -> Result<i8> {
    kronecker_generic(a.clone(), n.clone())
}

/// Machine-integer form used on hot paths.
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    kronecker_generic(a as i128, n as i128)
}

fn kronecker_generic<T>(mut a: T, mut n: T) -> Result<i8>
where
    T: Integer + Signed + Clone + FromPrimitive,
{
    if n.is_zero() {
        return Err(Error::domain("Kronecker symbol (a/0) is undefined here"));
    }
    let two = T::from_u8(2).unwrap();
    let four = T::from_u8(4).unwrap();
    let eight = T::from_u8(8).unwrap();
    let three = T::from_u8(3).unwrap();
    let five = T::from_u8(5).unwrap();

    let mut k: i8 = 1;
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            k = -k;
        }
    }
    if n.is_even() {
        if a.is_even() {
            return Ok(0);
        }
        let r = a.mod_floor(&eight);
        let mut v = 0u32;
        while n.is_even() {
            n = n / two.clone();
            v += 1;
        }
        if v % 2 == 1 && (r == three || r == five) {
            k = -k;
        }
    }
    // n is odd and positive: Jacobi symbol.
    a = a.mod_floor(&n);
    while !a.is_zero() {
        while a.is_even() {
            a = a / two.clone();
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                k = -k;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            k = -k;
        }
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { k } else { 0 })
}

/// Deterministic primality by trial division; inputs here are at most a few
/// million in practice.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if p > MAX_PRIME {
        Err(Error::domain(format!(
            "prime {p} exceeds the supported bound {MAX_PRIME}"
        )))
    } else if is_prime(p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{p} is not prime")))
    }
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factorize(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

pub fn is_square(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

/// Primes `<= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}
