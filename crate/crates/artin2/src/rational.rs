// SPDX-License-Identifier: Apache-2.0

//! Nonzero rationals, their prime factorizations, and the multiplicative
//! structure of the pair group <-1, a, b> inside Q*.
//!
//! The quantities downstream modules need are all read off the exponent
//! matrix of the pair: writing a = s_a * prod p^{e_p} and b likewise, the
//! rows (e_p) and (f_p) span a sublattice L of Z^P over the joint prime
//! support P. Then:
//!
//! * a and b are multiplicatively independent iff L has rank 2, iff some
//!   2x2 minor of the matrix is nonzero;
//! * the torsion subgroup of Q*/<-1, a, b> restricted to the support is
//!   sat(L)/L, whose order is the product of the elementary divisors of
//!   the matrix, equal to the gcd of all 2x2 minors (signs contribute
//!   nothing: -1 is in the group, so x and -x generate the same coset).
//!
//! The squarefree kernel of x is the signed product of the primes with odd
//! exponent, i.e. the unique squarefree d with x = d * (square). The
//! attached quadratic discriminant is d when d = 1 mod 4 and 4d otherwise,
//! the discriminant of Q(sqrt(x)) (trivially 1 when x is a square).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::primes::factor_u64;

/// Reduced nonzero rational with i64 numerator and positive i64 denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NonzeroRational {
    num: i64,
    den: i64,
}

impl NonzeroRational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if num == 0 {
            return Err(Error::InvalidInput("rational must be nonzero".into()));
        }
        if den == 0 {
            return Err(Error::InvalidInput("denominator must be nonzero".into()));
        }
        // Reduce in i128: |i64::MIN| and sign flips overflow i64.
        let mut n = num as i128;
        let mut d = den as i128;
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_i128(n.unsigned_abs(), d as u128) as i128;
        n /= g;
        d /= g;
        let num = i64::try_from(n)
            .map_err(|_| Error::ValueOutOfRange(format!("reduced numerator {n} exceeds i64")))?;
        let den = i64::try_from(d)
            .map_err(|_| Error::ValueOutOfRange(format!("reduced denominator {d} exceeds i64")))?;
        Ok(NonzeroRational { num, den })
    }

    pub fn from_integer(n: i64) -> Result<Self> {
        NonzeroRational::new(n, 1)
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    /// Always positive.
    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 1 && self.den == 1
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn inverse(&self) -> Result<Self> {
        NonzeroRational::new(self.den, self.num)
    }

    pub fn neg(&self) -> Result<Self> {
        if self.num == i64::MIN {
            return Err(Error::ValueOutOfRange("negation overflows i64".into()));
        }
        NonzeroRational::new(-self.num, self.den)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        // Cross-reduce first so the products stay within i128 comfortably.
        let n = self.num as i128 * other.num as i128;
        let d = self.den as i128 * other.den as i128;
        let g = gcd_i128(n.unsigned_abs(), d as u128) as i128;
        let num = i64::try_from(n / g)
            .map_err(|_| Error::ValueOutOfRange("product numerator exceeds i64".into()))?;
        let den = i64::try_from(d / g)
            .map_err(|_| Error::ValueOutOfRange("product denominator exceeds i64".into()))?;
        NonzeroRational::new(num, den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd_i128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl fmt::Display for NonzeroRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for NonzeroRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| -> Result<i64> {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidInput(format!("cannot parse '{t}' as an integer")))
        };
        match s.split_once('/') {
            Some((n, d)) => NonzeroRational::new(parse(n)?, parse(d)?),
            None => NonzeroRational::new(parse(s)?, 1),
        }
    }
}

/// Prime factorization of a nonzero rational: sign and a map from primes to
/// (possibly negative) exponents. Primes with exponent 0 are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredRational {
    sign: i8,
    exponents: BTreeMap<u64, i32>,
}

/// Factor a reduced rational. Only the factoring budget can fail here, and
/// never in practice for i64 inputs.
pub fn factor_rational(x: &NonzeroRational) -> Result<FactoredRational> {
    let mut exponents = BTreeMap::new();
    for (p, e) in factor_u64(x.numerator().unsigned_abs())? {
        exponents.insert(p, e as i32);
    }
    for (p, e) in factor_u64(x.denominator() as u64)? {
        // Numerator and denominator are coprime, so no collisions.
        debug_assert!(!exponents.contains_key(&p));
        exponents.insert(p, -(e as i32));
    }
    Ok(FactoredRational {
        sign: if x.numerator() < 0 { -1 } else { 1 },
        exponents,
    })
}

impl FactoredRational {
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i32> {
        &self.exponents
    }

    pub fn exponent_of(&self, p: u64) -> i32 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exponents = self.exponents.clone();
        for (&p, &e) in &other.exponents {
            let v = exponents.entry(p).or_insert(0);
            *v += e;
            if *v == 0 {
                exponents.remove(&p);
            }
        }
        FactoredRational {
            sign: self.sign * other.sign,
            exponents,
        }
    }

    /// Exact inverse of [`factor_rational`]; fails only if the value no
    /// longer fits in i64 after exponent arithmetic.
    pub fn reconstruct(&self) -> Result<NonzeroRational> {
        let mut num: i128 = self.sign as i128;
        let mut den: i128 = 1;
        for (&p, &e) in &self.exponents {
            let target = if e > 0 { &mut num } else { &mut den };
            for _ in 0..e.unsigned_abs() {
                *target = target
                    .checked_mul(p as i128)
                    .ok_or_else(|| Error::ValueOutOfRange("reconstruction overflows".into()))?;
            }
        }
        let num = i64::try_from(num)
            .map_err(|_| Error::ValueOutOfRange("reconstructed numerator exceeds i64".into()))?;
        let den = i64::try_from(den)
            .map_err(|_| Error::ValueOutOfRange("reconstructed denominator exceeds i64".into()))?;
        NonzeroRational::new(num, den)
    }

    pub fn is_square(&self) -> bool {
        self.sign > 0 && self.exponents.values().all(|e| e % 2 == 0)
    }

    /// Primes appearing with odd exponent, ascending.
    pub fn kernel_primes(&self) -> Vec<u64> {
        self.exponents
            .iter()
            .filter(|(_, &e)| e % 2 != 0)
            .map(|(&p, _)| p)
            .collect()
    }

    /// Signed squarefree kernel: the unique squarefree integer d with
    /// x = d * (rational square). Fits i128 because the product of the
    /// distinct primes of an integer never exceeds the integer itself.
    pub fn squarefree_kernel(&self) -> i128 {
        let mut d: i128 = self.sign as i128;
        for p in self.kernel_primes() {
            d *= p as i128;
        }
        d
    }
}

/// Discriminant of Q(sqrt(x)): the kernel d when d = 1 mod 4, else 4d.
/// Returns 1 when x is a square.
pub fn discriminant(x: &NonzeroRational) -> Result<i128> {
    Ok(disc_from_kernel(factor_rational(x)?.squarefree_kernel()))
}

pub(crate) fn disc_from_kernel(d: i128) -> i128 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// Exponent matrix of the pair over its joint prime support, one row per
/// value. Signs are dropped; see the module docs for why they cannot
/// contribute torsion.
fn exponent_rows(a: &FactoredRational, b: &FactoredRational) -> (Vec<i64>, Vec<i64>) {
    let mut support: Vec<u64> = a.exponents.keys().copied().collect();
    for &p in b.exponents.keys() {
        if !support.contains(&p) {
            support.push(p);
        }
    }
    support.sort_unstable();
    let row = |f: &FactoredRational| -> Vec<i64> {
        support.iter().map(|&p| f.exponent_of(p) as i64).collect()
    };
    (row(a), row(b))
}

fn minor_gcd(ra: &[i64], rb: &[i64]) -> u64 {
    let mut g: u64 = 0;
    for i in 0..ra.len() {
        for j in (i + 1)..ra.len() {
            let m = ra[i] * rb[j] - ra[j] * rb[i];
            g = crate::primes::gcd_u64(g, m.unsigned_abs());
        }
    }
    g
}

/// True iff the exponent vectors of a and b are linearly independent,
/// i.e. <a, b> has rank 2 in Q*/{+-1}.
pub fn multiplicatively_independent(a: &NonzeroRational, b: &NonzeroRational) -> Result<bool> {
    let (ra, rb) = exponent_rows(&factor_rational(a)?, &factor_rational(b)?);
    Ok(minor_gcd(&ra, &rb) != 0)
}

/// Order of the torsion subgroup of Q*/<-1, a, b> (supported on the primes
/// of a and b): the gcd of the 2x2 minors of the exponent matrix, which is
/// the product of its elementary divisors.
pub fn torsion_order(a: &NonzeroRational, b: &NonzeroRational) -> Result<u64> {
    let (ra, rb) = exponent_rows(&factor_rational(a)?, &factor_rational(b)?);
    match minor_gcd(&ra, &rb) {
        0 => Err(Error::DependentPair),
        g => Ok(g),
    }
}

/// Product of the distinct primes dividing either value (numerators and
/// denominators alike). Can exceed 128 bits for two full-width inputs.
pub fn radical_support(a: &NonzeroRational, b: &NonzeroRational) -> Result<BigUint> {
    let fa = factor_rational(a)?;
    let fb = factor_rational(b)?;
    let mut support: Vec<u64> = fa.exponents.keys().copied().collect();
    for &p in fb.exponents.keys() {
        if !support.contains(&p) {
            support.push(p);
        }
    }
    let mut out = BigUint::from(1u32);
    for p in support {
        out *= BigUint::from(p);
    }
    Ok(out)
}

/// Summary of the multiplicative structure of a pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairClassification {
    pub independent: bool,
    /// `None` exactly when the pair is dependent.
    pub torsion_order: Option<u64>,
    pub radical_support: BigUint,
}

impl PairClassification {
    pub fn torsionfree(&self) -> bool {
        self.torsion_order == Some(1)
    }
}

pub fn classify_pair(a: &NonzeroRational, b: &NonzeroRational) -> Result<PairClassification> {
    let t = match torsion_order(a, b) {
        Ok(t) => Some(t),
        Err(Error::DependentPair) => None,
        Err(e) => return Err(e),
    };
    Ok(PairClassification {
        independent: t.is_some(),
        torsion_order: t,
        radical_support: radical_support(a, b)?,
    })
}
