//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! non-zero if any fails or overruns its time budget.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use abvar_core::census::{
    census_divisor_chain, census_even, census_sqrt_minus_p, census_sqrt_q,
    local_indices_sqrt_minus_p,
};
use abvar_core::exact_arith::{is_prime, primes_up_to};
use abvar_core::genus::{
    genus_partition_oracle, principal_genus_count, ramified_prime_count, CmAlgebraSpec,
};
use abvar_core::quadratic_forms::{class_number_imaginary, class_number_order, ImaginaryOrderSpec};
use abvar_core::quaternion::{
    deuring_class_number, deuring_display, deuring_via_eichler, h_maximal, mass_superspecial,
    order_class_numbers, superspecial_count,
};
use abvar_core::real_units::{fundamental_unit, fundamental_unit_of_discriminant, unit_symbols};
use abvar_core::zeta::zeta_minus_one;
use abvar_core::{Discriminant, ExactRational};
use num_bigint::BigInt;
use rayon::prelude::*;

use common::{fundamental_discriminants, siegel_rearranged};

type Check = std::result::Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T>(r: abvar_core::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn rat(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d).unwrap()
}

fn c1() -> Check {
    let got: Vec<u64> = [2, 3, 5]
        .iter()
        .map(|&p| h_maximal(p))
        .collect::<Result<_, _>>()
        .map_err(|x| x.to_string())?;
    ensure(got == [1, 2, 1], || format!("h(O1) at 2, 3, 5 = {got:?}"))?;
    Ok("h(O1) = 1, 2, 1 at p = 2, 3, 5".into())
}

fn c2() -> Check {
    // Direct substitution into the small-prime case formulas.
    let q = |p: i64, a: u32| ExactRational::from(p.pow(a));
    let f2 = ExactRational::from(1i64) + (q(2, 3) - rat(2, 1)) / rat(6, 1);
    let f3 = ExactRational::from(2i64) + (q(3, 3) - rat(3, 1)) / rat(6, 1);
    let f5 = ExactRational::from(3i64) + rat(4, 15) * (q(5, 3) - rat(5, 1));
    for (p, formula, want) in [(2u64, f2, 2i64), (3, f3, 6), (5, f5, 35)] {
        let got = e(census_sqrt_q(p, 3))?.count;
        ensure(formula == ExactRational::from(want), || {
            format!("formula at p = {p} gives {formula}")
        })?;
        ensure(got == BigInt::from(want), || {
            format!("census_sqrt_q({p}, 3) = {got}, want {want}")
        })?;
    }
    let c13 = e(census_sqrt_q(13, 1))?.count;
    let sp13 = e(superspecial_count(13))?;
    ensure(c13 == BigInt::from(5) && sp13 == 5, || {
        format!("p = 13: census {c13}, |Sp| {sp13}")
    })?;
    Ok("2, 6, 35 at p = 2, 3, 5 (a = 3); census(13, 1) = |Sp(13)| = 5".into())
}

fn c3() -> Check {
    let primes: Vec<u64> = primes_up_to(500).into_iter().filter(|&p| p > 5).collect();
    let checked: usize = primes
        .par_iter()
        .map(|&p| -> std::result::Result<usize, String> {
            let sp = e(superspecial_count(p))?;
            let mass = e(mass_superspecial(p))?;
            for a in [1u32, 3] {
                let res = e(census_sqrt_q(p, a))?;
                let q_minus_p = BigInt::from(p).pow(a) - p;
                let rhs = ExactRational::from(sp) + ExactRational::from(&q_minus_p) * &mass;
                ensure(ExactRational::from(&res.count) == rhs, || {
                    format!(
                        "p = {p}, a = {a}: census {} vs |Sp| + (q-p) Mass = {rhs}",
                        res.count
                    )
                })?;
                ensure(
                    res.sp_count == Some(sp) && res.mass.as_ref() == Some(&mass),
                    || {
                        format!(
                            "p = {p}, a = {a}: record carries sp {:?}, mass {:?}",
                            res.sp_count, res.mass
                        )
                    },
                )?;
                let total: ExactRational = res.breakdown.iter().map(|(_, v)| v).sum();
                ensure(total == ExactRational::from(&res.count), || {
                    format!("p = {p}: breakdown sums to {total}")
                })?;
            }
            Ok(2)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok(format!(
        "{checked} (p, a) pairs with 5 < p <= 500, a in {{1, 3}}"
    ))
}

fn c4() -> Check {
    let primes = primes_up_to(2000);
    let outputs: usize = primes
        .par_iter()
        .map(|&p| -> std::result::Result<usize, String> {
            // Every value below is produced through an exact integrality check.
            let mut n = 0;
            for a in [1u32, 3] {
                e(census_sqrt_q(p, a))?;
                n += 1;
            }
            e(census_even(p, 2))?;
            e(census_sqrt_minus_p(p))?;
            let o = e(order_class_numbers(p))?;
            n += 3 + usize::from(o.h_o8.is_some()) + usize::from(o.h_o16.is_some());
            Ok(n)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;

    let discs = fundamental_discriminants(-10_000, -3);
    let chain_primes: Vec<u64> = primes.iter().copied().filter(|&p| p > 3).collect();
    let genus_and_chain: usize = discs
        .par_iter()
        .enumerate()
        .map(|(i, &d)| -> std::result::Result<usize, String> {
            e(principal_genus_count(&e(CmAlgebraSpec::from_values(&[d]))?))?;
            let p = chain_primes[i % chain_primes.len()];
            e(census_divisor_chain(p, d, 6, 2, &[0, 1, 2]))?;
            Ok(2)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok(format!(
        "{} integral outputs over p <= 2000 and {} fundamental D",
        outputs + genus_and_chain,
        discs.len()
    ))
}

fn c5() -> Check {
    let primes = primes_up_to(10_000);
    primes
        .par_iter()
        .try_for_each(|&p| -> std::result::Result<(), String> {
            let display = e(deuring_display(p))?;
            let eichler = e(deuring_via_eichler(p))?;
            ensure(display == eichler, || {
                format!("p = {p}: display {display}, Eichler route {eichler}")
            })
        })?;
    for (p, h) in [(2u64, 1u64), (3, 1), (5, 1), (7, 1), (11, 2), (37, 3)] {
        let got = e(deuring_class_number(p))?;
        ensure(got == h, || format!("h at p = {p} is {got}, want {h}"))?;
    }
    Ok(format!(
        "both routes agree for {} primes p <= 10^4; spot values match",
        primes.len()
    ))
}

fn c6() -> Check {
    let discs = fundamental_discriminants(-10_000, -3);
    let pairs: usize = discs
        .par_iter()
        .map(|&d0| -> std::result::Result<usize, String> {
            let fund = e(Discriminant::fundamental(d0))?;
            let mut n = 0;
            let mut f = 1u64;
            while (f * f) as i64 * -d0 <= 10_000 {
                let formula = e(class_number_order(&e(ImaginaryOrderSpec::new(fund, f))?))?;
                let disc = e(Discriminant::new((f * f) as i64 * d0))?;
                let forms = e(class_number_imaginary(&disc))?;
                ensure(formula == BigInt::from(forms), || {
                    format!("D0 = {d0}, f = {f}: formula {formula}, reduced forms {forms}")
                })?;
                n += 1;
                f += 1;
            }
            Ok(n)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok(format!("{pairs} orders with |f^2 D0| <= 10^4"))
}

fn c7() -> Check {
    let discs = fundamental_discriminants(5, 10_000);
    discs
        .par_iter()
        .try_for_each(|&d| -> std::result::Result<(), String> {
            let z = e(zeta_minus_one(&e(Discriminant::new(d))?))?;
            let oracle = siegel_rearranged(d);
            ensure(z == oracle, || format!("d = {d}: {z} vs oracle {oracle}"))
        })?;
    for (d, want) in [(5, rat(1, 30)), (8, rat(1, 12)), (13, rat(1, 6))] {
        let z = e(zeta_minus_one(&e(Discriminant::new(d))?))?;
        ensure(z == want, || format!("ζ(-1) at {d} = {z}, want {want}"))?;
    }
    Ok(format!(
        "{} fields with d_F <= 10^4; 1/30, 1/12, 1/6 at 5, 8, 13",
        discs.len()
    ))
}

fn norm_holds(x: &BigInt, y: &BigInt, radicand: i64, denom: u8, norm: i8) -> bool {
    x * x - BigInt::from(radicand) * y * y == BigInt::from(norm) * BigInt::from(denom).pow(2)
}

fn c8() -> Check {
    let primes = primes_up_to(10_000);
    let one_mod_eight: Vec<u64> = primes.iter().copied().filter(|p| p % 8 == 1).collect();
    one_mod_eight
        .par_iter()
        .try_for_each(|&p| -> std::result::Result<(), String> {
            let s = e(unit_symbols(p))?;
            ensure(s.varpi_p == 3, || {
                format!("varpi at p = {p} is {}", s.varpi_p)
            })
        })?;
    primes
        .par_iter()
        .try_for_each(|&p| -> std::result::Result<(), String> {
            let u = e(fundamental_unit(p))?;
            ensure(
                norm_holds(&u.x, &u.y, u.radicand as i64, u.denom, u.norm),
                || format!("unit of Q(√{p}) fails its norm equation"),
            )
        })?;
    let discs = fundamental_discriminants(5, 10_000);
    discs
        .par_iter()
        .try_for_each(|&d| -> std::result::Result<(), String> {
            let u = e(fundamental_unit_of_discriminant(&e(Discriminant::new(d))?))?;
            ensure(
                norm_holds(&u.x, &u.y, u.radicand as i64, u.denom, u.norm),
                || format!("unit for discriminant {d} fails its norm equation"),
            )
        })?;
    Ok(format!(
        "varpi = 3 at {} primes p = 1 mod 8; norm equations hold for {} primes and {} fields",
        one_mod_eight.len(),
        primes.len(),
        discs.len()
    ))
}

fn c9() -> Check {
    let discs = fundamental_discriminants(-10_000, -3);
    discs.par_iter().try_for_each(|&d| -> std::result::Result<(), String> {
        let disc = e(Discriminant::new(d))?;
        let part = e(genus_partition_oracle(&disc))?;
        let t = ramified_prime_count(&disc);
        let genera = 1usize << (t - 1);
        let sizes = part.genus_sizes();
        ensure(sizes.len() == genera, || format!("D = {d}: {} genera, want {genera}", sizes.len()))?;
        ensure(sizes.iter().all(|&s| s == sizes[0]), || format!("D = {d}: sizes {sizes:?}"))?;
        let h = e(class_number_imaginary(&disc))? as usize;
        let principal = part.principal_genus().len();
        let count = e(principal_genus_count(&e(CmAlgebraSpec::from_values(&[d]))?))? as usize;
        ensure(principal * genera == h && principal == count, || {
            format!("D = {d}: principal genus {principal}, h = {h}, 2^(t-1) = {genera}, count {count}")
        })
    })?;
    Ok(format!("{} fundamental D in [-10^4, 0)", discs.len()))
}

fn c10() -> Check {
    let expected_n = |p: u64| match p {
        2 => 1,
        3 => 2,
        _ if p % 4 == 1 => 1,
        _ if p % 8 == 7 => 2,
        _ => 4,
    };
    let primes = primes_up_to(1000);
    for &p in &primes {
        let n: u64 = e(local_indices_sqrt_minus_p(p))?.iter().sum();
        ensure(n == expected_n(p), || format!("N(π) at p = {p} is {n}"))?;
        let res = e(census_sqrt_minus_p(p))?;
        let h = e(class_number_imaginary(&e(
            abvar_core::discriminant_of_field(-(p as i64)),
        )?))?;
        ensure(res.count == BigInt::from(n * h), || {
            format!("p = {p}: count {}, N h = {}", res.count, n * h)
        })?;
    }
    for (p, want) in [(7u64, 2u64), (11, 4), (13, 2)] {
        debug_assert!(is_prime(p));
        let got = e(census_sqrt_minus_p(p))?.count;
        ensure(got == BigInt::from(want), || {
            format!("p = {p}: {got}, want {want}")
        })?;
    }
    Ok(format!(
        "N(π) table holds for {} primes p < 1000; 7, 11, 13 give 2, 4, 2",
        primes.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            1,
            "quaternion class number constants",
            Duration::from_secs(1),
            c1,
        ),
        (2, "small-prime census values", Duration::from_secs(1), c2),
        (3, "census = |Sp| + (q-p) Mass", Duration::from_secs(60), c3),
        (4, "integrality suite", Duration::from_secs(300), c4),
        (
            5,
            "Deuring class number, two routes",
            Duration::from_secs(60),
            c5,
        ),
        (
            6,
            "conductor formula vs enumeration",
            Duration::from_secs(120),
            c6,
        ),
        (
            7,
            "Siegel formula vs rearranged oracle",
            Duration::from_secs(60),
            c7,
        ),
        (
            8,
            "unit index and norm equations",
            Duration::from_secs(60),
            c8,
        ),
        (9, "genus theory partition", Duration::from_secs(300), c9),
        (10, "N(π) congruence table", Duration::from_secs(1), c10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("over time budget {budget:?}: {detail}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS [{elapsed:.2?}] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL [{elapsed:.2?}] {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
