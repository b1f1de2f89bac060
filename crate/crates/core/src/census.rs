//! Sizes `|A_π|` of isogeny classes for the Weil numbers handled here:
//! `π = ±sqrt(p^a)` for odd and even `a`, `π = sqrt(-p)`, and the divisor
//! chain sum over orders of an imaginary quadratic field.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{
    discriminant_of_field, factorize, ratio, require_prime, Discriminant, ExactRational,
};
use crate::quadratic_forms::{class_number_imaginary, class_number_order, ImaginaryOrderSpec};
use crate::quaternion::{
    deuring_class_number, deuring_terms, mass_superspecial, superspecial_count, FieldData,
};
use crate::real_units::unit_symbols;

/// A Weil number descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum CensusQuery {
    /// `π = ±sqrt(p^a)`, `a` odd.
    RealSqrtQ { p: u64, a: u32 },
    /// `π = ±sqrt(p^a)`, `a` even.
    RealSqrtQEven { p: u64, a: u32 },
    /// `π = sqrt(-p)`.
    ImagSqrtMinusP { p: u64 },
    /// `|A_π| = sum_i sum_{d_n | ... | d_1 | D} h(R_{p^{a_i} d_n})` in the
    /// imaginary quadratic field of discriminant `d0`.
    DivisorChain {
        p: u64,
        d0: i64,
        d: u64,
        n: u32,
        a_list: Vec<u32>,
    },
}

/// An exact count with its derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusResult {
    pub count: BigInt,
    /// `|Sp(π)|`, where the decomposition applies.
    pub sp_count: Option<u64>,
    /// Coefficient of `(q - p)`; `count = sp_count + (q - p) mass`.
    pub mass: Option<ExactRational>,
    /// Labelled terms summing exactly to `count`.
    pub breakdown: Vec<(String, ExactRational)>,
    /// Which formula produced the count.
    pub case: String,
}

impl CensusResult {
    fn from_terms(
        breakdown: Vec<(String, ExactRational)>,
        case: impl Into<String>,
        what: &str,
    ) -> Result<Self> {
        let total: ExactRational = breakdown.iter().map(|(_, v)| v).sum();
        let count = total.to_integer(what)?;
        if count <= BigInt::zero() {
            return Err(Error::integrality(format!(
                "{what} is not positive: {count}"
            )));
        }
        Ok(CensusResult {
            count,
            sp_count: None,
            mass: None,
            breakdown,
            case: case.into(),
        })
    }

    /// Checks that the breakdown sums to `count` and, when present, that
    /// `count = sp_count + (q - p) mass`.
    pub fn verify(&self, q_minus_p: Option<&BigInt>) -> Result<()> {
        let total: ExactRational = self.breakdown.iter().map(|(_, v)| v).sum();
        if total != ExactRational::from(&self.count) {
            return Err(Error::integrality(format!(
                "breakdown sums to {total}, count is {}",
                self.count
            )));
        }
        if let (Some(sp), Some(mass), Some(qp)) = (self.sp_count, &self.mass, q_minus_p) {
            let rhs = ExactRational::from(sp) + ExactRational::from(qp) * mass;
            if rhs != ExactRational::from(&self.count) {
                return Err(Error::integrality(format!(
                    "|Sp| + (q-p) Mass = {rhs} but the count is {}",
                    self.count
                )));
            }
        }
        Ok(())
    }
}

fn q_of(p: u64, a: u32) -> BigInt {
    BigInt::from(p).pow(a)
}

/// `(q - p) / |ρ(Aut(A0))|`, the number of non-superspecial classes over a
/// superspecial `A0`. `q = p^a` with `a` odd; the image order must divide
/// `|PGL_2(F_p)| = p (p^2 - 1)`.
pub fn fiber_size(q: &BigInt, p: u64, rho_image_order: u64) -> Result<BigInt> {
    require_prime(p)?;
    let pb = BigInt::from(p);
    let mut rest = q.clone();
    let mut a = 0u32;
    while rest > BigInt::one() && rest.is_multiple_of(&pb) {
        rest /= &pb;
        a += 1;
    }
    if !rest.is_one() || a.is_multiple_of(2) {
        return Err(Error::domain(format!("{q} is not an odd power of {p}")));
    }
    let pgl: BigInt = BigInt::from(p) * (BigInt::from(p) * p - 1);
    if rho_image_order == 0 || !pgl.is_multiple_of(&BigInt::from(rho_image_order)) {
        return Err(Error::domain(format!(
            "image order {rho_image_order} does not divide |PGL_2(F_{p})| = {pgl}"
        )));
    }
    let (quot, rem) = (q - &pb).div_rem(&BigInt::from(rho_image_order));
    if !rem.is_zero() {
        return Err(Error::domain(format!(
            "q - p = {} is not divisible by the image order {rho_image_order}",
            q - &pb
        )));
    }
    Ok(quot)
}

fn r<T: Into<BigInt>>(n: T) -> ExactRational {
    ExactRational::from_integer(n)
}

/// `|A_π|` for `π = ±sqrt(q)`, `q = p^a`, `a` odd.
pub fn census_sqrt_q(p: u64, a: u32) -> Result<CensusResult> {
    require_prime(p)?;
    if a.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "exponent a = {a} must be odd (use the even census)"
        )));
    }
    let q = q_of(p, a);
    let qp = &q - p;
    let what = format!("|A_pi| for pi = sqrt({p}^{a})");
    let result = match p {
        2 => {
            // ρ onto PGL_2(F_2), order 6.
            let fiber = fiber_size(&q, 2, 6)?;
            let mut res = CensusResult::from_terms(
                vec![("|Sp|".into(), r(1)), ("(q-2)/6".into(), r(fiber))],
                "p=2",
                &what,
            )?;
            res.sp_count = Some(1);
            res
        }
        3 => {
            // Two superspecial classes with ρ-images S4 (24) and D4 (8).
            let f24 = fiber_size(&q, 3, 24)?;
            let f8 = fiber_size(&q, 3, 8)?;
            let mut res = CensusResult::from_terms(
                vec![
                    ("|Sp|".into(), r(2)),
                    ("(q-3)/24".into(), r(f24)),
                    ("(q-3)/8".into(), r(f8)),
                ],
                "p=3",
                &what,
            )?;
            res.sp_count = Some(2);
            res
        }
        5 => {
            let mut res = CensusResult::from_terms(
                vec![
                    ("|Sp|".into(), r(3)),
                    ("4(q-5)/15".into(), ratio(4, 15) * r(qp.clone())),
                ],
                "p=5",
                &what,
            )?;
            res.sp_count = Some(3);
            res
        }
        _ => {
            let f = FieldData::new(p)?;
            let h = r(f.h_real);
            let zeta_half = &f.zeta / ratio(2, 1);
            let q_term = r(&qp + 1u32);
            let terms: Vec<(String, ExactRational)> = if p % 4 == 3 {
                let coeff = ratio(13, 8) - ratio(5, 8) * ExactRational::from(f.leg2);
                vec![
                    ("h(√p)(q-p+1)ζ_F(-1)/2".into(), &h * &q_term * &zeta_half),
                    (
                        "h(√p)(13/8-(5/8)(2/p))h(√-p)".into(),
                        &h * coeff * r(f.h_minus_p),
                    ),
                    ("h(√p)h(√-2p)/4".into(), &h * r(f.h_minus_2p) / ratio(4, 1)),
                    ("h(√p)h(√-3p)/6".into(), &h * r(f.h_minus_3p) / ratio(6, 1)),
                ]
            } else {
                let beta = unit_symbols(p)?.beta_p;
                vec![
                    (
                        "h(√p)(q-p+1)(1+5β_p)ζ_F(-1)/2".into(),
                        &h * &q_term * r(1 + 5 * beta) * &zeta_half,
                    ),
                    (
                        "h(√p)(1+β_p)h(√-p)/8".into(),
                        &h * r(1 + beta) * r(f.h_minus_p) / ratio(8, 1),
                    ),
                    (
                        "h(√p)2h(√-3p)/3".into(),
                        &h * r(2 * f.h_minus_3p) / ratio(3, 1),
                    ),
                ]
            };
            let case = if p % 4 == 3 {
                "p>5, p≡3 mod 4"
            } else {
                "p>5, p≡1 mod 4"
            };
            let mut res = CensusResult::from_terms(terms, case, &what)?;
            res.sp_count = Some(superspecial_count(p)?);
            res.mass = Some(mass_superspecial(p)?);
            res
        }
    };
    if p <= 5 {
        // The fiber weight per unit of (q - p), for the same identity.
        let weight = match p {
            2 => ratio(1, 6),
            3 => ratio(1, 24) + ratio(1, 8),
            _ => ratio(4, 15),
        };
        let expected = r(result.sp_count.unwrap_or(0)) + weight * r(qp.clone());
        if expected != r(result.count.clone()) {
            return Err(Error::integrality(format!(
                "{what}: fiber sum {expected} != {}",
                result.count
            )));
        }
    }
    result.verify(Some(&qp))?;
    Ok(result)
}

/// `|A_π|` for `π = ±sqrt(p^a)`, `a` even: the class number of a maximal
/// order in the definite quaternion algebra over `Q` ramified at `p`.
pub fn census_even(p: u64, a: u32) -> Result<CensusResult> {
    require_prime(p)?;
    if a == 0 || a % 2 == 1 {
        return Err(Error::domain(format!(
            "exponent a = {a} must be even and positive"
        )));
    }
    let [t1, t2, t3] = deuring_terms(p)?;
    let res = CensusResult::from_terms(
        vec![
            ("(p-1)/12".into(), t1),
            ("(1/3)(1-(-3/p))".into(), t2),
            ("(1/4)(1-(-4/p))".into(), t3),
        ],
        "a even",
        &format!("|A_pi| for pi = sqrt({p}^{a})"),
    )?;
    let cross = deuring_class_number(p)?;
    if res.count != BigInt::from(cross) {
        return Err(Error::integrality(format!(
            "even census {} != class number {cross}",
            res.count
        )));
    }
    Ok(res)
}

/// `N(π)` for `π = sqrt(-p)`, as the local index terms `n_X` it sums.
pub fn local_indices_sqrt_minus_p(p: u64) -> Result<Vec<u64>> {
    require_prime(p)?;
    Ok(if p == 2 || p % 4 == 1 {
        vec![1]
    } else if p == 3 || p % 8 == 7 {
        vec![1, 1]
    } else {
        vec![1, 3]
    })
}

/// `|A_π| = N(π) h(Q(sqrt -p))` for `π = sqrt(-p)`.
pub fn census_sqrt_minus_p(p: u64) -> Result<CensusResult> {
    let indices = local_indices_sqrt_minus_p(p)?;
    let h = class_number_imaginary(&discriminant_of_field(-(p as i64))?)?;
    let n: u64 = indices.iter().sum();
    let terms = indices
        .iter()
        .enumerate()
        .map(|(i, &nx)| (format!("n_X{}·h(Q(√-p))", i + 1), r(nx * h)))
        .collect();
    let case = format!("N(π)={n}");
    CensusResult::from_terms(terms, case, &format!("|A_pi| for pi = sqrt(-{p})"))
}

/// Number of chains `d_n | d_{n-1} | ... | d_1 | big_d` ending at `d_n`:
/// for each `l^e || big_d` with `l^k || d_n`, choose the exponents of
/// `d_{n-1}, ..., d_1` as a weakly increasing sequence in `[k, e]`.
pub fn chain_count(big_d: u64, d_n: u64, n: u32) -> Result<BigInt> {
    if n == 0 || big_d == 0 || d_n == 0 || !big_d.is_multiple_of(d_n) {
        return Err(Error::domain(format!(
            "need n >= 1 and d_n | D, got n={n}, d_n={d_n}, D={big_d}"
        )));
    }
    let mut total = BigInt::one();
    for (l, e) in factorize(big_d) {
        let mut k = 0u32;
        let mut m = d_n;
        while m.is_multiple_of(l) {
            m /= l;
            k += 1;
        }
        let slots = BigInt::from((e - k) as u64 + (n - 1) as u64);
        total *= binomial(slots, BigInt::from(n - 1));
    }
    Ok(total)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (l, e) in factorize(n) {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for &d in &out {
            let mut pw = 1u64;
            for _ in 0..=e {
                next.push(d * pw);
                pw *= l;
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// Divisor chain census in the imaginary quadratic field of discriminant `d0`.
/// The local data `a_list` (the `p`-power exponents of the endomorphism
/// orders at `p`) is an input.
pub fn census_divisor_chain(
    p: u64,
    d0: i64,
    big_d: u64,
    n: u32,
    a_list: &[u32],
) -> Result<CensusResult> {
    require_prime(p)?;
    let fundamental = Discriminant::fundamental(d0)?;
    if !fundamental.is_negative() {
        return Err(Error::domain(format!("{d0} is not negative")));
    }
    if big_d == 0 || n == 0 {
        return Err(Error::domain("D and n must be positive"));
    }
    if big_d.gcd(&p) != 1 {
        return Err(Error::domain(format!(
            "gcd(p, D) = gcd({p}, {big_d}) is not 1"
        )));
    }
    if a_list.is_empty() {
        return Err(Error::domain("a_list must be nonempty"));
    }
    let mut terms = Vec::new();
    for &a in a_list {
        for d_n in divisors(big_d) {
            let chains = chain_count(big_d, d_n, n)?;
            let mut factors: BTreeMap<u64, u32> = factorize(d_n).into_iter().collect();
            if a > 0 {
                *factors.entry(p).or_insert(0) += a;
            }
            let factors: Vec<_> = factors.into_iter().collect();
            let spec = ImaginaryOrderSpec::from_factors(fundamental, &factors)?;
            let h = class_number_order(&spec)?;
            terms.push((
                format!("a={a} d_n={d_n}: {chains}·h(R_{})", spec.conductor()),
                r(chains * h),
            ));
        }
    }
    CensusResult::from_terms(terms, "divisor chains", "divisor chain census")
}

/// Dispatches a query to the matching census.
pub fn census(query: &CensusQuery) -> Result<CensusResult> {
    match query {
        CensusQuery::RealSqrtQ { p, a } => census_sqrt_q(*p, *a),
        CensusQuery::RealSqrtQEven { p, a } => census_even(*p, *a),
        CensusQuery::ImagSqrtMinusP { p } => census_sqrt_minus_p(*p),
        CensusQuery::DivisorChain {
            p,
            d0,
            d,
            n,
            a_list,
        } => census_divisor_chain(*p, *d0, *d, *n, a_list),
    }
}

/// `q - p` for the odd-exponent queries; handy for [`CensusResult::verify`].
pub fn q_minus_p(p: u64, a: u32) -> BigInt {
    q_of(p, a) - p
}

/// Census values as small integers, for tests and tables.
pub fn count_u64(res: &CensusResult) -> Option<u64> {
    res.count.to_u64()
}
