//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use abvar_core::exact_arith::{factorize, is_squarefree};
use abvar_core::ExactRational;
use num_bigint::BigInt;

/// Sum of divisors through the prime factorization.
pub fn sigma1(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(l, e)| (l.pow(e + 1) - 1) / (l - 1))
        .product()
}

/// `ζ_F(-1)` rearranged as `(1/60)(σ1(d/4) [4 | d] + 2 sum_{b > 0} σ1((d - b^2)/4))`.
pub fn siegel_rearranged(d: i64) -> ExactRational {
    let mut total = 0u64;
    let mut b = d % 2;
    while b * b < d {
        let s = sigma1(((d - b * b) / 4) as u64);
        total += if b == 0 { s } else { 2 * s };
        b += 2;
    }
    ExactRational::new(total, 60).unwrap()
}

/// Fundamental discriminants in `[lo, hi]`.
pub fn fundamental_discriminants(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi)
        .filter(|&d| d != 0 && d != 1)
        .filter(|&d| match d.rem_euclid(4) {
            1 => is_squarefree(d),
            0 => {
                let m = d / 4;
                matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
            }
            _ => false,
        })
        .collect()
}

/// Every chain `d_n | ... | d_1 | big_d`, listed by its last element.
pub fn chains(big_d: u64, n: u32) -> Vec<u64> {
    fn go(top: u64, left: u32, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(top);
            return;
        }
        for d in 1..=top {
            if top.is_multiple_of(d) {
                go(d, left - 1, out);
            }
        }
    }
    let mut out = Vec::new();
    go(big_d, n, &mut out);
    out
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}
