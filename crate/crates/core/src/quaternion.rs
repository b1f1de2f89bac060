//! Class numbers and masses of the orders `O1`, `O8`, `O16` of the totally
//! definite quaternion algebra over `Q(sqrt p)` unramified at all finite
//! places, and the class number of a maximal order of the definite
//! quaternion algebra over `Q` ramified at `p`.
//!
//! Every closed form is evaluated in exact rationals and must come out
//! integral; a fractional value is reported as [`Error::Integrality`].

use crate::error::{Error, Result};
use crate::exact_arith::{
    discriminant_of_field, kronecker, ratio, require_prime, Discriminant, ExactRational,
};
use crate::quadratic_forms::{class_number_imaginary, field_class_number, reduced_forms};
use crate::real_units::unit_symbols;
use crate::zeta::zeta_minus_one;

/// Arithmetic inputs shared by the closed forms for a prime `p >= 5`.
#[derive(Clone, Debug)]
pub struct FieldData {
    pub p: u64,
    /// `h(sqrt p)`.
    pub h_real: u64,
    /// `ζ_F(-1)`, `F = Q(sqrt p)`.
    pub zeta: ExactRational,
    /// `h(sqrt -p)`, `h(sqrt -2p)`, `h(sqrt -3p)`.
    pub h_minus_p: u64,
    pub h_minus_2p: u64,
    pub h_minus_3p: u64,
    /// `(2/p)`.
    pub leg2: i64,
}

impl FieldData {
    pub fn new(p: u64) -> Result<Self> {
        require_prime(p)?;
        if p < 5 {
            return Err(Error::domain(format!("field data needs p >= 5, got {p}")));
        }
        let pi = p as i64;
        let real = discriminant_of_field(pi)?;
        Ok(FieldData {
            p,
            h_real: field_class_number(pi)?,
            zeta: zeta_minus_one(&real)?,
            h_minus_p: field_class_number(-pi)?,
            h_minus_2p: field_class_number(-2 * pi)?,
            h_minus_3p: field_class_number(-3 * pi)?,
            leg2: kronecker(2, pi)? as i64,
        })
    }
}

/// Class numbers of the three orders plus the mass of the superspecial locus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderClassNumbers {
    pub h_o1: u64,
    /// Present iff `p = 1 mod 4`.
    pub h_o8: Option<u64>,
    pub h_o16: Option<u64>,
    /// `None` for `p <= 5`.
    pub mass_sp: Option<ExactRational>,
}

fn r(n: u64) -> ExactRational {
    ExactRational::from(n)
}

/// `h(O1)`, class number of a maximal order.
pub fn h_maximal(p: u64) -> Result<u64> {
    require_prime(p)?;
    match p {
        2 | 5 => return Ok(1),
        3 => return Ok(2),
        _ => {}
    }
    let f = FieldData::new(p)?;
    let half_zeta = &f.zeta / ratio(2, 1);
    let bracket = if p % 4 == 1 {
        half_zeta + r(f.h_minus_p) / ratio(8, 1) + r(f.h_minus_3p) / ratio(6, 1)
    } else {
        let coeff = ratio(13, 8) - ratio(5, 8) * ExactRational::from(f.leg2);
        half_zeta
            + coeff * r(f.h_minus_p)
            + r(f.h_minus_2p) / ratio(4, 1)
            + r(f.h_minus_3p) / ratio(6, 1)
    };
    (r(f.h_real) * bracket).to_positive_u64(&format!("h(O1) for p = {p}"))
}

fn require_one_mod_four(p: u64) -> Result<()> {
    require_prime(p)?;
    if p % 4 != 1 {
        return Err(Error::domain(format!(
            "O8 and O16 exist only for p = 1 mod 4, got {p}"
        )));
    }
    Ok(())
}

/// `h(O8)` for `p = 1 mod 4`.
pub fn h_o8(p: u64) -> Result<u64> {
    require_one_mod_four(p)?;
    let f = FieldData::new(p)?;
    let s = unit_symbols(p)?;
    let leg = ExactRational::from(f.leg2);
    let bracket = (ratio(4, 1) - &leg) * &f.zeta / ratio(2, 1)
        + (ratio(2, 1) - &leg) * r(f.h_minus_p) / ratio(24, 1)
        + r(s.delta_1_varpi as u64) * r(f.h_minus_3p) / ratio(3, 1);
    (r(s.varpi_p as u64) * r(f.h_real) * bracket).to_positive_u64(&format!("h(O8) for p = {p}"))
}

/// `h(O16)` for `p = 1 mod 4`.
pub fn h_o16(p: u64) -> Result<u64> {
    require_one_mod_four(p)?;
    let f = FieldData::new(p)?;
    let s = unit_symbols(p)?;
    let leg = ExactRational::from(f.leg2);
    let bracket = (ratio(3, 1) - ratio(2, 1) * &leg) * &f.zeta
        + (ratio(2, 1) - &leg) * r(f.h_minus_p) / ratio(12, 1)
        + r(f.h_minus_3p) / ratio(6, 1);
    (r(s.varpi_p as u64) * r(f.h_real) * bracket).to_positive_u64(&format!("h(O16) for p = {p}"))
}

/// Number of superspecial classes `|Sp|` in the isogeny class of `sqrt(p^a)`,
/// `a` odd: `h(O1)` for `p = 2` or `p = 3 mod 4`, else `h(O1) + h(O8) + h(O16)`.
pub fn superspecial_count(p: u64) -> Result<u64> {
    let o = order_class_numbers(p)?;
    Ok(o.h_o1 + o.h_o8.unwrap_or(0) + o.h_o16.unwrap_or(0))
}

/// Mass of the superspecial locus for `p > 5`: the coefficient of `(q - p)`.
pub fn mass_superspecial(p: u64) -> Result<ExactRational> {
    require_prime(p)?;
    if p <= 5 {
        return Err(Error::domain(format!(
            "superspecial mass formula needs p > 5, got {p}"
        )));
    }
    let f = FieldData::new(p)?;
    let base = r(f.h_real) * &f.zeta / ratio(2, 1);
    if p % 4 == 3 {
        Ok(base)
    } else {
        let beta = unit_symbols(p)?.beta_p;
        Ok(base * ExactRational::from(1 + 5 * beta))
    }
}

pub fn order_class_numbers(p: u64) -> Result<OrderClassNumbers> {
    require_prime(p)?;
    let h_o1 = h_maximal(p)?;
    let (h_o8, h_o16) = if p % 4 == 1 {
        (Some(h_o8(p)?), Some(h_o16(p)?))
    } else {
        (None, None)
    };
    if p == 5 {
        // Only the total is pinned down independently: |Sp| = 3 at p = 5.
        let total = h_o1 + h_o8.unwrap_or(0) + h_o16.unwrap_or(0);
        if total != 3 {
            return Err(Error::integrality(format!(
                "h(O1)+h(O8)+h(O16) = {total} at p = 5, expected 3"
            )));
        }
    }
    let mass_sp = if p > 5 {
        Some(mass_superspecial(p)?)
    } else {
        None
    };
    Ok(OrderClassNumbers {
        h_o1,
        h_o8,
        h_o16,
        mass_sp,
    })
}

/// The three terms of the class number of a maximal order in the definite
/// quaternion algebra over `Q` ramified at `p`:
/// `(p-1)/12`, `(1/3)(1 - (-3/p))`, `(1/4)(1 - (-4/p))`.
pub fn deuring_terms(p: u64) -> Result<[ExactRational; 3]> {
    require_prime(p)?;
    let pi = p as i64;
    Ok([
        ratio(pi - 1, 12),
        ratio(1 - kronecker(-3, pi)? as i64, 3),
        ratio(1 - kronecker(-4, pi)? as i64, 4),
    ])
}

pub fn deuring_display(p: u64) -> Result<ExactRational> {
    Ok(deuring_terms(p)?.iter().sum())
}

/// `ζ_Q(-1) = -B_2 / 2`, with `B_2` from the Bernoulli recurrence.
fn zeta_q_minus_one() -> ExactRational {
    // sum_{k=0}^{n} C(n+1, k) B_k = 0 for n >= 1, B_0 = 1.
    let b0 = ExactRational::one();
    let b1 = -(b0.clone() / ratio(2, 1));
    let b2 = -(b0 + ratio(3, 1) * b1) / ratio(3, 1);
    -(b2 / ratio(2, 1))
}

/// A CM order `B = Z[...]` in an imaginary quadratic field with `w(B) > 1`,
/// as used by Eichler's class number formula over `Z`.
#[derive(Clone, Debug)]
pub struct EllipticOrder {
    pub discriminant: i64,
    pub units: u64,
    pub class_number: u64,
}

/// Orders `B` with `[B^x : Z^x] > 1`. A unit other than ±1 has trace in
/// {-1, 0, 1}, so only discriminants with `|D| <= 4` can qualify; their unit
/// groups are counted as representations of 1 by the principal form.
pub fn elliptic_orders() -> Result<Vec<EllipticOrder>> {
    let mut out = Vec::new();
    for v in -4..0 {
        let Ok(d) = Discriminant::new(v) else {
            continue;
        };
        let principal = reduced_forms(&d)?
            .into_iter()
            .find(|f| f.a == 1)
            .ok_or_else(|| Error::integrality(format!("no principal form for {v}")))?;
        let units = (-1i64..=1)
            .flat_map(|x| (-1i64..=1).map(move |y| (x, y)))
            .filter(|&(x, y)| principal.evaluate(x, y) == 1)
            .count() as u64;
        if units > 2 {
            out.push(EllipticOrder {
                discriminant: v,
                units,
                class_number: class_number_imaginary(&d)?,
            });
        }
    }
    Ok(out)
}

/// Eichler's class number formula for a maximal order of the definite
/// quaternion algebra over `Q` ramified at `p`:
/// `h = Mass + (1/2) sum_B (2 - δ(B)) h(B) (1 - 1/w(B)) m_p(B)`,
/// with `Mass = |ζ_Q(-1)| (p - 1)` (weights `[O_i^x : Z^x]`), `δ(B) = 1`,
/// `w(B) = |B^x| / 2`, and the only nontrivial local embedding number at
/// the ramified prime `m_p(B) = 1 - (D_B / p)`.
pub fn deuring_via_eichler(p: u64) -> Result<ExactRational> {
    require_prime(p)?;
    let mass = zeta_q_minus_one().abs() * ExactRational::from(p - 1);
    let mut total = mass;
    for b in elliptic_orders()? {
        let w = ExactRational::from(b.units / 2);
        let delta = ExactRational::one();
        let m_p = ExactRational::from(1 - kronecker(b.discriminant, p as i64)? as i64);
        total = total
            + ratio(1, 2)
                * (ratio(2, 1) - delta)
                * ExactRational::from(b.class_number)
                * (ExactRational::one() - ExactRational::one() / w)
                * m_p;
    }
    Ok(total)
}

/// Class number of a maximal order in the definite quaternion algebra over
/// `Q` ramified at `p`, computed two ways and required to agree.
pub fn deuring_class_number(p: u64) -> Result<u64> {
    let display = deuring_display(p)?;
    let eichler = deuring_via_eichler(p)?;
    if display != eichler {
        return Err(Error::integrality(format!(
            "Deuring formula {display} disagrees with Eichler's formula {eichler} at p = {p}"
        )));
    }
    display.to_positive_u64(&format!("Deuring class number at p = {p}"))
}
