//! Fundamental units of real quadratic fields via continued fractions, and
//! the unit-index symbols built from them.
//!
//! `varpi_p = 3 / [O_F^x : Z[sqrt p]^x]` for `F = Q(sqrt p)`. The index is 1
//! or 3, and it is 1 exactly when the fundamental unit already lies in
//! `Z[sqrt p]`, so `varpi_p` is read off the unit's denominator. (The
//! defining expression is sometimes printed with the imaginary field
//! `Q(sqrt -p)` in place of `F`; only the real field makes sense there.)

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{is_square, kronecker, require_prime, Discriminant};

/// `sqrt(n) = [a0; period...]` with the period repeating forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub a0: u64,
    pub period: Vec<u64>,
}

/// Continued fraction of `sqrt(n)` for non-square `n >= 2`.
///
/// The period ends at the first recurrence of the complete-quotient state,
/// which for `sqrt(n)` is the first partial quotient equal to `2 a0`.
pub fn continued_fraction_sqrt(n: u64) -> Result<ContinuedFraction> {
    if n < 2 || is_square(n) {
        return Err(Error::domain(format!("{n} is not a positive non-square")));
    }
    let a0 = n.sqrt();
    // Complete quotient (m + sqrt n) / d.
    let (mut m, mut d, mut a) = (0u64, 1u64, a0);
    let mut period = Vec::new();
    loop {
        m = d * a - m;
        d = (n - m * m) / d;
        a = (a0 + m) / d;
        period.push(a);
        if d == 1 {
            break;
        }
    }
    Ok(ContinuedFraction { a0, period })
}

/// `(x + y sqrt(radicand)) / denom` with `x, y > 0`, the fundamental unit of
/// the maximal order of `Q(sqrt(radicand))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub radicand: u64,
    pub x: BigInt,
    pub y: BigInt,
    pub denom: u8,
    pub norm: i8,
}

impl FundamentalUnit {
    /// Checks `(x^2 - radicand y^2) / denom^2 = norm` exactly.
    pub fn satisfies_norm_equation(&self) -> bool {
        let lhs = &self.x * &self.x - BigInt::from(self.radicand) * &self.y * &self.y;
        let den = BigInt::from(self.denom) * BigInt::from(self.denom);
        lhs == den * BigInt::from(self.norm)
    }

    pub fn in_z_sqrt(&self) -> bool {
        self.denom == 1
    }

    /// `epsilon^k` as `(x, y, denom)` in lowest terms (`denom` 1 or 2).
    pub fn pow(&self, k: u32) -> (BigInt, BigInt, u8) {
        let r = BigInt::from(self.radicand);
        let (mut x, mut y) = (BigInt::one(), BigInt::zero());
        let mut den = BigInt::one();
        for _ in 0..k {
            // (x + y s)(u + v s) with a shared denominator.
            let nx = &x * &self.x + &r * &y * &self.y;
            let ny = &x * &self.y + &y * &self.x;
            x = nx;
            y = ny;
            den *= self.denom;
            let g = x.gcd(&y).gcd(&den);
            x /= &g;
            y /= &g;
            den /= &g;
        }
        let den = if den.is_one() { 1 } else { 2 };
        (x, y, den)
    }
}

/// State `(P + sqrt d) / Q` of a continued fraction expansion with
/// `Q | d - P^2`.
struct QuadraticExpansion {
    d: i64,
    s: i64,
    p: i64,
    q: i64,
}

impl QuadraticExpansion {
    fn next_quotient(&mut self) -> i64 {
        let a = Integer::div_floor(&(self.p + self.s), &self.q);
        self.p = a * self.q - self.p;
        self.q = (self.d - self.p * self.p) / self.q;
        a
    }
}

/// Fundamental unit of the maximal order of discriminant `d` (fundamental, > 0).
///
/// Every unit `> 1` comes from a convergent `h/k` of `omega` (`sqrt(m)` or
/// `(1 + sqrt D)/2`); the first convergent of norm ±1 has the smallest
/// `y` and is therefore fundamental.
pub fn fundamental_unit_of_discriminant(d: &Discriminant) -> Result<FundamentalUnit> {
    let disc = d.value();
    if disc <= 0 || !d.is_fundamental() {
        return Err(Error::domain(format!(
            "{d} is not a positive fundamental discriminant"
        )));
    }
    let half_integral = disc % 4 == 1;
    let radicand = if half_integral { disc } else { disc / 4 };
    let mut exp = if half_integral {
        QuadraticExpansion {
            d: disc,
            s: (disc as u64).sqrt() as i64,
            p: 1,
            q: 2,
        }
    } else {
        QuadraticExpansion {
            d: radicand,
            s: (radicand as u64).sqrt() as i64,
            p: 0,
            q: 1,
        }
    };
    let rad = BigInt::from(radicand);
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    // The period of either expansion is O(sqrt(d) log d); this is generous.
    let limit = 4 * (disc as u64).sqrt() * 64 + 64;
    for _ in 0..limit {
        let a = BigInt::from(exp.next_quotient());
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);

        if half_integral {
            // h - k * conj(omega) = ((2h - k) + k sqrt D) / 2
            let x = BigInt::from(2) * &h - &k;
            let n4 = &x * &x - &rad * &k * &k;
            if n4 == BigInt::from(4) || n4 == BigInt::from(-4) {
                let norm = if n4 > BigInt::zero() { 1 } else { -1 };
                let unit = if x.is_even() && k.is_even() {
                    FundamentalUnit {
                        radicand: radicand as u64,
                        x: x / 2,
                        y: &k / 2,
                        denom: 1,
                        norm,
                    }
                } else {
                    FundamentalUnit {
                        radicand: radicand as u64,
                        x,
                        y: k.clone(),
                        denom: 2,
                        norm,
                    }
                };
                return Ok(unit);
            }
        } else {
            let n = &h * &h - &rad * &k * &k;
            if n.is_one() || n == BigInt::from(-1) {
                let norm = if n.is_one() { 1 } else { -1 };
                return Ok(FundamentalUnit {
                    radicand: radicand as u64,
                    x: h,
                    y: k,
                    denom: 1,
                    norm,
                });
            }
        }
    }
    Err(Error::integrality(format!(
        "no unit found in the continued fraction of discriminant {d}"
    )))
}

/// Fundamental unit of `Q(sqrt p)` for a prime `p`.
pub fn fundamental_unit(p: u64) -> Result<FundamentalUnit> {
    require_prime(p)?;
    let disc = if p % 4 == 1 { p as i64 } else { 4 * p as i64 };
    fundamental_unit_of_discriminant(&Discriminant::fundamental(disc)?)
}

/// Unit-index data for a prime `p = 1 mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitSymbols {
    /// `3 / [O_F^x : Z[sqrt p]^x]`, 1 or 3.
    pub varpi_p: u8,
    /// 1 iff `varpi_p = 1`.
    pub delta_1_varpi: u8,
    /// `varpi_p (2 - (2/p))`.
    pub beta_p: i64,
}

pub fn unit_symbols(p: u64) -> Result<UnitSymbols> {
    require_prime(p)?;
    if p % 4 != 1 {
        return Err(Error::domain(format!(
            "unit symbols need p = 1 mod 4, got {p}"
        )));
    }
    let unit = fundamental_unit(p)?;
    let varpi_p: u8 = if unit.in_z_sqrt() { 3 } else { 1 };
    let delta_1_varpi = u8::from(varpi_p == 1);
    let beta_p = varpi_p as i64 * (2 - kronecker(2, p as i64)? as i64);
    Ok(UnitSymbols {
        varpi_p,
        delta_1_varpi,
        beta_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continued_fraction_examples() {
        let cf = continued_fraction_sqrt(2).unwrap();
        assert_eq!((cf.a0, cf.period), (1, vec![2]));
        let cf = continued_fraction_sqrt(7).unwrap();
        assert_eq!((cf.a0, cf.period), (2, vec![1, 1, 1, 4]));
        let cf = continued_fraction_sqrt(13).unwrap();
        assert_eq!((cf.a0, cf.period), (3, vec![1, 1, 1, 1, 6]));
        assert!(continued_fraction_sqrt(16).is_err());
        assert!(continued_fraction_sqrt(1).is_err());
    }

    fn unit(p: u64) -> (i64, i64, u8, i8) {
        let u = fundamental_unit(p).unwrap();
        (
            u.x.try_into().unwrap(),
            u.y.try_into().unwrap(),
            u.denom,
            u.norm,
        )
    }

    #[test]
    fn fundamental_unit_examples() {
        assert_eq!(unit(2), (1, 1, 1, -1));
        assert_eq!(unit(5), (1, 1, 2, -1));
        assert_eq!(unit(7), (8, 3, 1, 1));
        assert_eq!(unit(13), (3, 1, 2, -1));
        assert_eq!(unit(17), (4, 1, 1, -1));
        assert_eq!(unit(3), (2, 1, 1, 1));
        assert!(fundamental_unit(15).is_err());
    }

    #[test]
    fn non_prime_discriminants() {
        let u = fundamental_unit_of_discriminant(&Discriminant::new(40).unwrap()).unwrap();
        assert_eq!((u.x, u.y, u.denom, u.norm), (3.into(), 1.into(), 1, -1));
        let u = fundamental_unit_of_discriminant(&Discriminant::new(21).unwrap()).unwrap();
        assert_eq!((u.x, u.y, u.denom, u.norm), (5.into(), 1.into(), 2, 1));
        assert!(fundamental_unit_of_discriminant(&Discriminant::new(-4).unwrap()).is_err());
    }

    #[test]
    fn unit_symbol_examples() {
        assert_eq!(
            unit_symbols(5).unwrap(),
            UnitSymbols {
                varpi_p: 1,
                delta_1_varpi: 1,
                beta_p: 3
            }
        );
        assert_eq!(unit_symbols(17).unwrap().varpi_p, 3);
        assert_eq!(unit_symbols(17).unwrap().delta_1_varpi, 0);
        let s13 = unit_symbols(13).unwrap();
        assert_eq!((s13.varpi_p, s13.beta_p), (1, 3));
        assert!(unit_symbols(7).is_err());
        assert!(unit_symbols(21).is_err());
    }

    #[test]
    fn huge_unit_stays_exact() {
        // Q(sqrt 94) has the fundamental unit 2143295 + 221064 sqrt 94.
        let u = fundamental_unit_of_discriminant(&Discriminant::new(376).unwrap()).unwrap();
        assert_eq!(u.x, 2143295.into());
        assert_eq!(u.y, 221064.into());
        assert!(u.satisfies_norm_equation());
    }

    #[test]
    fn units_satisfy_norm_equation_and_cube_is_integral() {
        for p in crate::exact_arith::primes_up_to(3000) {
            let u = fundamental_unit(p).unwrap();
            assert!(u.satisfies_norm_equation(), "p = {p}");
            let (x, y, den) = u.pow(3);
            assert_eq!(den, 1, "cube of the unit of Q(sqrt {p}) not in Z[sqrt p]");
            let n = &x * &x - BigInt::from(p) * &y * &y;
            assert_eq!(n, BigInt::from(u.norm), "p = {p}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn period_is_palindromic_and_ends_in_twice_a0(n in 2u64..200_000) {
                prop_assume!(!is_square(n));
                let cf = continued_fraction_sqrt(n).unwrap();
                let (last, body) = cf.period.split_last().unwrap();
                prop_assert_eq!(*last, 2 * cf.a0);
                let rev: Vec<_> = body.iter().rev().copied().collect();
                prop_assert_eq!(rev, body.to_vec());
            }
        }
    }
}
