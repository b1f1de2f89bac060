//! Principal genus counts for CM algebras that are products of imaginary
//! quadratic fields, and the classical genus-character partition used to
//! check them.
//!
//! For a factor `K_i` with `t_i` ramified primes, `h_{K_i^+} = 1` and the
//! Hasse unit index is 1, so the principal genus has `h(K_i) / 2^{t_i - 1}`
//! classes; over a product the counts multiply.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exact_arith::{factorize, kronecker, Discriminant};
use crate::quadratic_forms::{class_number_imaginary, reduced_forms, BinaryQuadraticForm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmAlgebraSpec {
    factors: Vec<Discriminant>,
}

impl CmAlgebraSpec {
    pub fn new(factors: Vec<Discriminant>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::domain("a CM algebra needs at least one factor"));
        }
        for d in &factors {
            if !d.is_negative() || !d.is_fundamental() {
                return Err(Error::domain(format!(
                    "{d} is not a negative fundamental discriminant"
                )));
            }
        }
        Ok(CmAlgebraSpec { factors })
    }

    pub fn from_values(values: &[i64]) -> Result<Self> {
        let factors = values
            .iter()
            .map(|&v| Discriminant::new(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    pub fn factors(&self) -> &[Discriminant] {
        &self.factors
    }
}

/// Number of primes dividing the discriminant.
pub fn ramified_prime_count(d: &Discriminant) -> u32 {
    factorize(d.value().unsigned_abs()).len() as u32
}

/// Classes in the principal genus: `prod_i h(K_i) / 2^{t_i - 1}`.
pub fn principal_genus_count(spec: &CmAlgebraSpec) -> Result<u64> {
    let mut total = 1u64;
    for d in &spec.factors {
        let h = class_number_imaginary(d)?;
        let genera = 1u64 << (ramified_prime_count(d) - 1);
        let (q, rem) = h.div_rem(&genera);
        if rem != 0 {
            return Err(Error::integrality(format!(
                "h({d}) = {h} is not divisible by the genus count {genera}"
            )));
        }
        total = total
            .checked_mul(q)
            .ok_or_else(|| Error::domain("principal genus count exceeds 64 bits"))?;
    }
    Ok(total)
}

/// Prime discriminants whose product is the fundamental discriminant `d`:
/// `(-1)^((l-1)/2) l` for odd `l`, and one of `-4, 8, -8` for the 2-part.
pub fn prime_discriminants(d: &Discriminant) -> Result<Vec<i64>> {
    if !d.is_fundamental() {
        return Err(Error::domain(format!("{d} is not fundamental")));
    }
    let mut out = Vec::new();
    let mut rest = d.value();
    for (l, _) in factorize(d.value().unsigned_abs()) {
        if l == 2 {
            continue;
        }
        let l = l as i64;
        let star = if l % 4 == 1 { l } else { -l };
        out.push(star);
        rest /= star;
    }
    if rest != 1 {
        if !matches!(rest, -4 | 8 | -8) {
            return Err(Error::integrality(format!(
                "2-part {rest} of {d} is not a prime discriminant"
            )));
        }
        out.insert(0, rest);
    }
    Ok(out)
}

/// Classes of reduced forms grouped by their genus-character values.
#[derive(Clone, Debug)]
pub struct GenusPartition {
    pub discriminant: Discriminant,
    /// The assigned characters, as prime discriminants `d*` with `χ(n) = (d*/n)`.
    pub characters: Vec<i64>,
    /// Each reduced form with its character vector.
    pub assignments: Vec<(BinaryQuadraticForm, Vec<i8>)>,
    /// Genera keyed by character vector; the all-`+1` genus is principal.
    pub genera: BTreeMap<Vec<i8>, Vec<BinaryQuadraticForm>>,
}

impl GenusPartition {
    pub fn principal_key(&self) -> Vec<i8> {
        vec![1; self.characters.len()]
    }

    pub fn principal_genus(&self) -> &[BinaryQuadraticForm] {
        self.genera
            .get(&self.principal_key())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn genus_sizes(&self) -> Vec<usize> {
        self.genera.values().map(Vec::len).collect()
    }
}

/// A value `n > 0` properly represented by `f` with `gcd(n, d) = 1`.
fn represented_unit_value(f: &BinaryQuadraticForm, d: i64) -> Result<i64> {
    let dd = d.unsigned_abs() as i128;
    for bound in [8i64, 32, 128, 512] {
        for x in 0..=bound {
            for y in -bound..=bound {
                if x.gcd(&y) != 1 {
                    continue;
                }
                let n = f.evaluate(x, y);
                if n > 0 && n.gcd(&dd) == 1 {
                    return i64::try_from(n)
                        .map_err(|_| Error::domain("represented value overflow"));
                }
            }
        }
    }
    Err(Error::integrality(format!(
        "no value coprime to {d} represented by {f}"
    )))
}

/// Partitions the form classes of `d` into genera by assigned characters and
/// checks the genus theory facts: `2^{t-1}` genera, all the same size.
pub fn genus_partition_oracle(d: &Discriminant) -> Result<GenusPartition> {
    if !d.is_negative() || !d.is_fundamental() {
        return Err(Error::domain(format!(
            "{d} is not a negative fundamental discriminant"
        )));
    }
    let characters = prime_discriminants(d)?;
    let forms = reduced_forms(d)?;
    let mut assignments = Vec::with_capacity(forms.len());
    let mut genera: BTreeMap<Vec<i8>, Vec<BinaryQuadraticForm>> = BTreeMap::new();
    for f in forms {
        let n = represented_unit_value(&f, d.value())?;
        let chi = characters
            .iter()
            .map(|&c| kronecker(c, n))
            .collect::<Result<Vec<i8>>>()?;
        if chi.iter().product::<i8>() != 1 {
            return Err(Error::integrality(format!(
                "characters of {f} multiply to -1 (D = {d}, n = {n})"
            )));
        }
        genera.entry(chi.clone()).or_default().push(f);
        assignments.push((f, chi));
    }
    let partition = GenusPartition {
        discriminant: *d,
        characters,
        assignments,
        genera,
    };

    let t = partition.characters.len() as u32;
    let expected = 1usize << (t - 1);
    if partition.genera.len() != expected {
        return Err(Error::integrality(format!(
            "{} genera for D = {d}, expected 2^(t-1) = {expected}",
            partition.genera.len()
        )));
    }
    let sizes = partition.genus_sizes();
    if sizes.iter().any(|&s| s != sizes[0]) {
        return Err(Error::integrality(format!(
            "unequal genus sizes {sizes:?} for D = {d}"
        )));
    }
    if partition.principal_genus().is_empty() {
        return Err(Error::integrality(format!(
            "principal form of {d} missing from its genus"
        )));
    }
    Ok(partition)
}
