//! `ζ_F(-1)` for real quadratic `F` via Siegel's formula
//!
//! ```text
//! ζ_F(-1) = (1/60) * sum of a over all b in Z, a, c > 0 with b^2 + 4ac = d_F
//! ```

use num_bigint::BigInt;
use num_integer::Roots;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact_arith::{Discriminant, ExactRational};

fn require_real_fundamental(d: &Discriminant) -> Result<()> {
    if d.value() <= 0 || !d.is_fundamental() {
        return Err(Error::domain(format!(
            "{d} is not a positive fundamental discriminant"
        )));
    }
    Ok(())
}

/// Sum of `a` over factorizations `n = a c` with `a, c > 0`, by divisor pairing.
fn sum_of_first_factors(n: u64) -> u64 {
    let mut total = 0u64;
    let mut a = 1u64;
    while a * a <= n {
        if n.is_multiple_of(a) {
            let c = n / a;
            total += a;
            if c != a {
                total += c;
            }
        }
        a += 1;
    }
    total
}

/// Per-`b` contributions `(b, sum of a)` for every `b` with `b^2 < d_F` and
/// `b = d_F mod 2`, `b` ascending from negative to positive.
pub fn siegel_terms(d: &Discriminant) -> Result<Vec<(i64, u64)>> {
    require_real_fundamental(d)?;
    let disc = d.value();
    let s = (disc as u64).sqrt() as i64;
    let start = if (s - disc).rem_euclid(2) == 0 {
        -s
    } else {
        -s + 1
    };
    let bs: Vec<i64> = (start..=s).step_by(2).filter(|b| b * b < disc).collect();
    Ok(bs
        .into_par_iter()
        .map(|b| (b, sum_of_first_factors(((disc - b * b) / 4) as u64)))
        .collect())
}

/// Exact `ζ_F(-1)` for the real quadratic field of discriminant `d`.
pub fn zeta_minus_one(d: &Discriminant) -> Result<ExactRational> {
    let total: BigInt = siegel_terms(d)?.iter().map(|&(_, s)| BigInt::from(s)).sum();
    ExactRational::new(total, 60)
}
