//! Class numbers of quadratic orders from binary quadratic forms.
//!
//! Imaginary discriminants: one reduced positive-definite form per proper
//! class, found by exhaustive scan. Real discriminants: reduced indefinite
//! forms grouped into cycles of the rho operator. Only primitive forms count.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::One;

use crate::cache;
use crate::error::{Error, Result};
use crate::exact_arith::{kronecker_symbol, Discriminant, ExactRational};
use crate::real_units::fundamental_unit_of_discriminant;

/// `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryQuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryQuadraticForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryQuadraticForm { a, b, c }
    }

    pub fn discriminant(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        b * b - 4 * a * c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// Reduced positive-definite form: `|b| <= a <= c`, and `b >= 0` when
    /// `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let BinaryQuadraticForm { a, b, c } = *self;
        if a <= 0 || b.abs() > a || a > c {
            return false;
        }
        !((b.abs() == a || a == c) && b < 0)
    }

    pub fn evaluate(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// The form `f(p x + q y, r x + s y)`. The result is properly equivalent
    /// to `self` when `p s - q r = 1`.
    pub fn transform(&self, p: i64, q: i64, r: i64, s: i64) -> Option<BinaryQuadraticForm> {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (p, q, r, s) = (p as i128, q as i128, r as i128, s as i128);
        let na = a * p * p + b * p * r + c * r * r;
        let nb = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
        let nc = a * q * q + b * q * s + c * s * s;
        Some(BinaryQuadraticForm::new(
            na.try_into().ok()?,
            nb.try_into().ok()?,
            nc.try_into().ok()?,
        ))
    }

    /// The reduced form properly equivalent to this positive-definite form.
    pub fn reduce(&self) -> Result<BinaryQuadraticForm> {
        let disc = self.discriminant();
        if disc >= 0 || self.a <= 0 {
            return Err(Error::domain(format!("{self} is not positive definite")));
        }
        let (mut a, mut b) = (self.a as i128, self.b as i128);
        let c = loop {
            // Bring b into (-a, a].
            let two_a = 2 * a;
            let shift = Integer::div_ceil(&(b - a), &two_a);
            b -= shift * two_a;
            let c = (b * b - disc) / (4 * a);
            if a > c {
                (a, b) = (c, -b);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break c;
        };
        let conv =
            |v: i128| i64::try_from(v).map_err(|_| Error::domain("form coefficient overflow"));
        Ok(BinaryQuadraticForm::new(conv(a)?, conv(b)?, conv(c)?))
    }

    /// Reduced indefinite form of positive non-square discriminant `disc`:
    /// `0 < b < sqrt(disc)` and `sqrt(disc) - b < 2|a| < sqrt(disc) + b`.
    pub fn is_reduced_indefinite(&self, disc: i64) -> bool {
        let (a, b) = (self.a.unsigned_abs() as i128, self.b as i128);
        let d = disc as i128;
        if self.discriminant() != d || b <= 0 || b * b >= d {
            return false;
        }
        let lower = 2 * a + b;
        let upper = 2 * a - b;
        lower * lower > d && (upper < 0 || upper * upper < d)
    }

    /// Right neighbour `(c, b', (b'^2 - D)/(4c))` with `b' = -b mod 2|c|` and
    /// `sqrt(D) - 2|c| < b' < sqrt(D)`. Maps reduced indefinite forms to
    /// reduced indefinite forms.
    pub fn rho(&self, disc: i64) -> BinaryQuadraticForm {
        let s = (disc as u64).sqrt() as i64;
        let m = 2 * self.c.abs();
        let b = s - (s + self.b).rem_euclid(m);
        let c = (b as i128 * b as i128 - disc as i128) / (4 * self.c as i128);
        BinaryQuadraticForm::new(self.c, b, c as i64)
    }
}

impl fmt::Display for BinaryQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn require_negative(d: &Discriminant) -> Result<()> {
    if d.is_negative() {
        Ok(())
    } else {
        Err(Error::domain(format!("discriminant {d} is not negative")))
    }
}

/// One reduced representative per proper class of primitive positive-definite
/// forms of discriminant `d`, sorted by `(a, b, c)`.
pub fn reduced_forms(d: &Discriminant) -> Result<Vec<BinaryQuadraticForm>> {
    require_negative(d)?;
    let disc = d.value();
    let abs = disc.unsigned_abs();
    let a_max = (abs / 3).sqrt() as i64;
    let mut out = Vec::new();
    for a in 1..=a_max {
        let b_start = if (a - disc).rem_euclid(2) == 0 {
            -a
        } else {
            -a + 1
        };
        for b in (b_start..=a).step_by(2) {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = BinaryQuadraticForm::new(a, b, c);
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// Number of proper classes of primitive positive-definite forms of
/// discriminant `d`, i.e. the class number of the order of discriminant `d`.
/// Memoized in the process-wide cache.
pub fn class_number_imaginary(d: &Discriminant) -> Result<u64> {
    require_negative(d)?;
    cache::global().get_or_compute(d.value(), || Ok(reduced_forms(d)?.len() as u64))
}

/// Order of conductor `f` in the imaginary quadratic field of fundamental
/// discriminant `D0`. The conductor is held factored so its size is
/// unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImaginaryOrderSpec {
    fundamental: Discriminant,
    conductor_factors: BTreeMap<u64, u32>,
}

impl ImaginaryOrderSpec {
    pub fn new(fundamental: Discriminant, conductor: u64) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::domain("conductor must be positive"));
        }
        let factors = crate::exact_arith::factorize(conductor);
        Self::from_factors(fundamental, &factors)
    }

    /// Conductor given as prime powers `[(l, e), ...]`; repeated primes merge.
    pub fn from_factors(fundamental: Discriminant, factors: &[(u64, u32)]) -> Result<Self> {
        if !fundamental.is_negative() || !fundamental.is_fundamental() {
            return Err(Error::domain(format!(
                "{fundamental} is not a negative fundamental discriminant"
            )));
        }
        let mut conductor_factors = BTreeMap::new();
        for &(l, e) in factors {
            if !crate::exact_arith::is_prime(l) {
                return Err(Error::domain(format!("conductor factor {l} is not prime")));
            }
            if e > 0 {
                *conductor_factors.entry(l).or_insert(0) += e;
            }
        }
        Ok(ImaginaryOrderSpec {
            fundamental,
            conductor_factors,
        })
    }

    pub fn fundamental(&self) -> Discriminant {
        self.fundamental
    }

    pub fn conductor(&self) -> BigInt {
        self.conductor_factors
            .iter()
            .fold(BigInt::one(), |acc, (&l, &e)| acc * BigInt::from(l).pow(e))
    }

    /// `f^2 * D0`.
    pub fn discriminant(&self) -> BigInt {
        let f = self.conductor();
        &f * &f * self.fundamental.value()
    }
}

/// Class number of a possibly non-maximal imaginary quadratic order by the
/// conductor formula
/// `h(R_f) = h(O) f prod_{l | f} (1 - (D0/l)/l) / [O^x : R_f^x]`.
pub fn class_number_order(spec: &ImaginaryOrderSpec) -> Result<BigInt> {
    let d0 = spec.fundamental.value();
    let h0 = class_number_imaginary(&spec.fundamental)?;
    if spec.conductor_factors.is_empty() {
        return Ok(h0.into());
    }
    let mut value = ExactRational::from(h0) * ExactRational::from(spec.conductor());
    for &l in spec.conductor_factors.keys() {
        let l = BigInt::from(l);
        let chi = kronecker_symbol(&BigInt::from(d0), &l)?;
        value = value * ExactRational::new(&l - chi, l)?;
    }
    let unit_index: i64 = match d0 {
        -4 => 2,
        -3 => 3,
        _ => 1,
    };
    value = value / ExactRational::from(unit_index);
    value.to_integer(&format!(
        "conductor formula for D0 = {d0}, f = {}",
        spec.conductor()
    ))
}

fn require_positive_nonsquare(d: &Discriminant) -> Result<()> {
    let v = d.value();
    if v <= 0 || crate::exact_arith::is_square(v as u64) {
        return Err(Error::domain(format!(
            "{d} is not a positive non-square discriminant"
        )));
    }
    Ok(())
}

/// All primitive reduced indefinite forms of discriminant `d`.
pub fn reduced_indefinite_forms(d: &Discriminant) -> Result<Vec<BinaryQuadraticForm>> {
    require_positive_nonsquare(d)?;
    let disc = d.value();
    let s = (disc as u64).sqrt() as i64;
    let mut out = Vec::new();
    let b_first = if (s - disc).rem_euclid(2) == 0 {
        s
    } else {
        s - 1
    };
    let mut b = b_first;
    while b > 0 {
        let n = (disc - b * b) / 4;
        // |a| ranges over divisors of n inside the reduction window.
        let mut k = 1;
        while k * k <= n {
            if n % k == 0 {
                for abs_a in [k, n / k] {
                    for a in [abs_a, -abs_a] {
                        let f = BinaryQuadraticForm::new(a, b, -n / a);
                        if f.is_reduced_indefinite(disc) && f.is_primitive() {
                            out.push(f);
                        }
                    }
                }
            }
            k += 1;
        }
        b -= 2;
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The rho-cycles partitioning the reduced indefinite forms of `d`.
pub fn indefinite_cycles(d: &Discriminant) -> Result<Vec<Vec<BinaryQuadraticForm>>> {
    let forms = reduced_indefinite_forms(d)?;
    let all: HashSet<_> = forms.iter().copied().collect();
    let mut seen = HashSet::with_capacity(forms.len());
    let mut cycles = Vec::new();
    for &start in &forms {
        if seen.contains(&start) {
            continue;
        }
        let mut cycle = vec![start];
        seen.insert(start);
        let mut cur = start.rho(d.value());
        while cur != start {
            if !all.contains(&cur) || !seen.insert(cur) {
                return Err(Error::integrality(format!(
                    "rho left the reduced set or merged cycles at {cur} (D = {d})"
                )));
            }
            cycle.push(cur);
            cur = cur.rho(d.value());
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// Narrow class number: the number of rho-cycles of reduced indefinite forms.
pub fn narrow_class_number(d: &Discriminant) -> Result<u64> {
    Ok(indefinite_cycles(d)?.len() as u64)
}

/// Wide class number of the real quadratic field of fundamental discriminant
/// `d`: `h+` when the fundamental unit has norm -1, else `h+ / 2`.
pub fn class_number_real(d: &Discriminant) -> Result<u64> {
    require_positive_nonsquare(d)?;
    if !d.is_fundamental() {
        return Err(Error::domain(format!(
            "{d} is not a fundamental discriminant"
        )));
    }
    cache::global().get_or_compute(d.value(), || {
        let narrow = narrow_class_number(d)?;
        let unit = fundamental_unit_of_discriminant(d)?;
        if unit.norm == -1 {
            Ok(narrow)
        } else if narrow % 2 == 0 {
            Ok(narrow / 2)
        } else {
            Err(Error::integrality(format!(
                "narrow class number {narrow} of {d} is odd but the unit has norm +1"
            )))
        }
    })
}

/// `h(sqrt(m))`: class number of `Q(sqrt(m))` for squarefree `m`.
pub fn field_class_number(m: i64) -> Result<u64> {
    let d = crate::exact_arith::discriminant_of_field(m)?;
    if d.is_negative() {
        class_number_imaginary(&d)
    } else {
        class_number_real(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(v: i64) -> Discriminant {
        Discriminant::new(v).unwrap()
    }

    fn forms(v: &[(i64, i64, i64)]) -> Vec<BinaryQuadraticForm> {
        let mut f: Vec<_> = v
            .iter()
            .map(|&(a, b, c)| BinaryQuadraticForm::new(a, b, c))
            .collect();
        f.sort();
        f
    }

    #[test]
    fn reduced_forms_examples() {
        assert_eq!(reduced_forms(&disc(-3)).unwrap(), forms(&[(1, 1, 1)]));
        assert_eq!(reduced_forms(&disc(-4)).unwrap(), forms(&[(1, 0, 1)]));
        assert_eq!(
            reduced_forms(&disc(-23)).unwrap(),
            forms(&[(1, 1, 6), (2, 1, 3), (2, -1, 3)])
        );
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number_imaginary(&disc(-7)).unwrap(), 1);
        assert_eq!(class_number_imaginary(&disc(-52)).unwrap(), 2);
        assert_eq!(class_number_imaginary(&disc(-39)).unwrap(), 4);
        assert_eq!(
            reduced_forms(&disc(-52)).unwrap(),
            forms(&[(1, 0, 13), (2, 2, 7)])
        );
        assert_eq!(
            reduced_forms(&disc(-39)).unwrap(),
            forms(&[(1, 1, 10), (2, 1, 5), (2, -1, 5), (3, 3, 4)])
        );
    }

    #[test]
    fn imprimitive_forms_excluded() {
        // (2, 2, 2) has discriminant -12 but is imprimitive.
        assert_eq!(reduced_forms(&disc(-12)).unwrap(), forms(&[(1, 0, 3)]));
        assert_eq!(class_number_imaginary(&disc(-36)).unwrap(), 2);
    }

    #[test]
    fn rejects_bad_discriminants() {
        assert!(reduced_forms(&disc(5)).is_err());
        assert!(class_number_imaginary(&disc(8)).is_err());
        assert!(class_number_real(&disc(-4)).is_err());
        assert!(class_number_real(&disc(20)).is_err());
        assert!(reduced_indefinite_forms(&disc(16)).is_err());
    }

    #[test]
    fn conductor_formula_examples() {
        let spec = |d0: i64, f: u64| ImaginaryOrderSpec::new(disc(d0), f).unwrap();
        assert_eq!(class_number_order(&spec(-4, 1)).unwrap(), 1.into());
        assert_eq!(class_number_order(&spec(-3, 2)).unwrap(), 1.into());
        assert_eq!(class_number_order(&spec(-7, 2)).unwrap(), 1.into());
        assert_eq!(class_number_order(&spec(-4, 3)).unwrap(), 2.into());
        assert_eq!(class_number_order(&spec(-7, 3)).unwrap(), 4.into());
        assert_eq!(class_number_imaginary(&disc(-12)).unwrap(), 1);
        assert!(ImaginaryOrderSpec::new(disc(-4), 0).is_err());
        assert!(ImaginaryOrderSpec::new(disc(-12), 1).is_err());
        assert!(ImaginaryOrderSpec::new(disc(5), 1).is_err());
    }

    #[test]
    fn conductor_formula_handles_huge_conductors() {
        let spec = ImaginaryOrderSpec::from_factors(disc(-7), &[(3, 40), (2, 1)]).unwrap();
        let h = class_number_order(&spec).unwrap();
        // h(-7) = 1; f = 2 * 3^40; (-7/2) = 1, (-7/3) = -1.
        let expected = BigInt::from(3).pow(39) * 4;
        assert_eq!(h, expected);
    }

    #[test]
    fn real_class_numbers() {
        assert_eq!(class_number_real(&disc(5)).unwrap(), 1);
        assert_eq!(class_number_real(&disc(8)).unwrap(), 1);
        assert_eq!(class_number_real(&disc(40)).unwrap(), 2);
        assert_eq!(narrow_class_number(&disc(40)).unwrap(), 2);
        // Q(sqrt 3): unit 2 + sqrt 3 has norm +1, so h+ = 2h.
        assert_eq!(narrow_class_number(&disc(12)).unwrap(), 2);
        assert_eq!(class_number_real(&disc(12)).unwrap(), 1);
        // Q(sqrt 79) has class number 3.
        assert_eq!(class_number_real(&disc(316)).unwrap(), 3);
        // Q(sqrt 229) has class number 3.
        assert_eq!(class_number_real(&disc(229)).unwrap(), 3);
    }

    #[test]
    fn rho_cycles_of_five() {
        let cycles = indefinite_cycles(&disc(5)).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 2);
    }

    #[test]
    fn one_class_fundamental_discriminants() {
        let one_class: Vec<i64> = (-200..0)
            .filter(|&v| {
                Discriminant::new(v)
                    .map(|d| d.is_fundamental())
                    .unwrap_or(false)
            })
            .filter(|&v| class_number_imaginary(&disc(v)).unwrap() == 1)
            .collect();
        assert_eq!(one_class, vec![-163, -67, -43, -19, -11, -8, -7, -4, -3]);

        // Counting non-maximal orders too gives the thirteen one-class discriminants.
        let all: Vec<i64> = (-200..0)
            .filter(|v: &i64| matches!(v.rem_euclid(4), 0 | 1))
            .filter(|&v| class_number_imaginary(&disc(v)).unwrap() == 1)
            .collect();
        assert_eq!(
            all,
            vec![-163, -67, -43, -28, -27, -19, -16, -12, -11, -8, -7, -4, -3]
        );
    }

    #[test]
    fn reduction_is_identity_on_reduced_forms() {
        for v in (-400..0).filter(|v: &i64| matches!(v.rem_euclid(4), 0 | 1)) {
            for f in reduced_forms(&disc(v)).unwrap() {
                assert_eq!(f.reduce().unwrap(), f);
                assert_eq!(f.discriminant(), v as i128);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sl2() -> impl Strategy<Value = (i64, i64, i64, i64)> {
            // Products of the generators T^k and S give all of SL2(Z).
            prop::collection::vec((-3i64..=3, any::<bool>()), 1..6).prop_map(|steps| {
                let mut m = (1i64, 0i64, 0i64, 1i64);
                for (k, s) in steps {
                    m = (m.0, m.0 * k + m.1, m.2, m.2 * k + m.3);
                    if s {
                        m = (m.1, -m.0, m.3, -m.2);
                    }
                }
                m
            })
        }

        proptest! {
            #[test]
            fn equivalent_forms_reduce_to_the_same_representative(
                n in 3i64..2000, idx in 0usize..64, m in sl2()
            ) {
                let v = -n;
                prop_assume!(matches!(v.rem_euclid(4), 0 | 1));
                let reps = reduced_forms(&disc(v)).unwrap();
                prop_assume!(!reps.is_empty());
                let f = reps[idx % reps.len()];
                let g = f.transform(m.0, m.1, m.2, m.3).unwrap();
                prop_assert_eq!(g.discriminant(), v as i128);
                prop_assert_eq!(g.reduce().unwrap(), f);
            }

            #[test]
            fn returned_forms_are_reduced_primitive_and_distinct(n in 3i64..5000) {
                let v = -n;
                prop_assume!(matches!(v.rem_euclid(4), 0 | 1));
                let reps = reduced_forms(&disc(v)).unwrap();
                prop_assert!(!reps.is_empty());
                let set: HashSet<_> = reps.iter().collect();
                prop_assert_eq!(set.len(), reps.len());
                for f in &reps {
                    prop_assert!(f.is_reduced() && f.is_primitive());
                    prop_assert_eq!(f.discriminant(), v as i128);
                }
            }

            #[test]
            fn real_class_number_divides_narrow(d in 5i64..3000) {
                let dd = Discriminant::new(d);
                prop_assume!(dd.map(|x| x.is_fundamental()).unwrap_or(false));
                let dd = disc(d);
                let h = class_number_real(&dd).unwrap();
                let narrow = narrow_class_number(&dd).unwrap();
                let norm = fundamental_unit_of_discriminant(&dd).unwrap().norm;
                prop_assert_eq!(narrow % h, 0);
                let q = narrow / h;
                prop_assert!(q == 1 || q == 2);
                prop_assert_eq!(q == 1, norm == -1);
            }
        }
    }
}
