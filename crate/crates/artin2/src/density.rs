// SPDX-License-Identifier: Apache-2.0

//! Exact rational density coefficients.
//!
//! For a multiplicatively independent pair (a, b) whose quotient group
//! Q*/<-1, a, b> is torsionfree, the density of primes p with
//! (b mod p) in <a mod p> is c * S, where S is the universal constant
//! prod_p (1 - p/(p^3 - 1)) handled in [`crate::constants`], and the
//! correction factor c is an explicit rational built from three quadratic
//! discriminants:
//!
//! ```text
//! c = 1 + r(lcm(2, D(a))) + e(b) r(D(b)) + e(ab) r(D(ab))
//! ```
//!
//! with D(x) the discriminant of Q(sqrt(x)), e(x) = 3/10 if D(x) is odd
//! and 1 otherwise, and r the multiplicative function
//!
//! ```text
//! r(n) = prod_{p | n} (-p^(4 - 3 ord_p(n))) / (p^3 - p - 1)
//! ```
//!
//! evaluated on |n| (signs never reach r: discriminant parity and
//! divisibility are all that matter). The empty product is 1, so r(1) = 1.
//!
//! The same machinery exposes the index-lattice sums the correction factor
//! is assembled from: `smn_closed(m, n)` is the closed form of
//! sum_{m | i, mn | ij} mu(j) / (i^2 j phi(ij)) as a rational multiple of
//! S, and `s2n_prime(n)` its parity-restricted variant over even i and
//! odd j. Identities such as smn_closed(1, n) = r(n) * S and the
//! four-term assembly of c are exercised by the test suite as independent
//! routes to the same numbers.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed};

use crate::constants;
use crate::error::{Error, Result};
use crate::primes::{factor_u64, gcd_u64};
use crate::rational::{factor_rational, torsion_order, FactoredRational, NonzeroRational};

pub type ExactRational = Ratio<BigInt>;

/// An exact rational multiple of the universal constant S.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SMultiple {
    pub coefficient: ExactRational,
}

impl SMultiple {
    pub fn new(coefficient: ExactRational) -> Self {
        SMultiple { coefficient }
    }

    /// Numerical value of coefficient * S at f64 precision.
    pub fn approx(&self) -> f64 {
        ratio_to_f64(&self.coefficient) * constants::s_f64()
    }
}

impl std::fmt::Display for SMultiple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) * S", self.coefficient)
    }
}

pub(crate) fn ratio_to_f64(r: &ExactRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().expect("finite rational")
}

/// Moebius function; 0 on non-squarefree n.
pub fn moebius(n: u64) -> Result<i32> {
    if n == 0 {
        return Err(Error::InvalidInput("moebius undefined at 0".into()));
    }
    let f = factor_u64(n)?;
    if f.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.len() % 2 == 0 { 1 } else { -1 })
}

/// Euler totient.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("phi undefined at 0".into()));
    }
    let mut out = n;
    for (p, _) in factor_u64(n)? {
        out = out / p * (p - 1);
    }
    Ok(out)
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// p^3 - p - 1 as a BigInt.
fn cubic_den(p: u64) -> BigInt {
    let p = BigInt::from(p);
    &p * &p * &p - &p - 1
}

/// One local factor of r: (-p^(4 - 3 ord)) / (p^3 - p - 1).
fn r_local(p: u64, ord: u32) -> ExactRational {
    let pb = BigInt::from(p);
    let e = 4i64 - 3 * ord as i64;
    let (num, den) = if e >= 0 {
        (-pb.pow(e as u32), BigInt::one())
    } else {
        (-BigInt::one(), pb.pow((-e) as u32))
    };
    Ratio::new(num, den * cubic_den(p))
}

pub(crate) fn r_from_pairs(pairs: &[(u64, u32)]) -> ExactRational {
    let mut out = ExactRational::one();
    for &(p, e) in pairs {
        out *= r_local(p, e);
    }
    out
}

/// r(n) = prod_{p | n} (-p^(4 - 3 ord_p(n))) / (p^3 - p - 1) on |n|;
/// r(1) = r(-1) = 1 (empty product).
pub fn r_factor(n: i64) -> Result<ExactRational> {
    if n == 0 {
        return Err(Error::InvalidInput("r undefined at 0".into()));
    }
    Ok(r_from_pairs(&factor_u64(n.unsigned_abs())?))
}

/// Discriminant of Q(sqrt(x)) in factored form. `two` is ord_2, `odd` the
/// odd primes (each to the first power: kernels are squarefree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DiscParts {
    pub negative: bool,
    pub two: u32,
    pub odd: Vec<u64>,
}

impl DiscParts {
    pub(crate) fn of(f: &FactoredRational) -> DiscParts {
        let kernel_odd: Vec<u64> = f.kernel_primes().into_iter().filter(|&p| p != 2).collect();
        let kernel_even = f.kernel_primes().contains(&2);
        let d = f.squarefree_kernel();
        if d.rem_euclid(4) == 1 {
            // d odd here: even squarefree d is 2 mod 4.
            debug_assert!(!kernel_even);
            DiscParts {
                negative: d < 0,
                two: 0,
                odd: kernel_odd,
            }
        } else {
            DiscParts {
                negative: d < 0,
                two: if kernel_even { 3 } else { 2 },
                odd: kernel_odd,
            }
        }
    }

    pub(crate) fn is_odd(&self) -> bool {
        self.two == 0
    }

    /// |D| as u128; the kernel divides the product of numerator and
    /// denominator of an i64 rational, so 4|d| fits comfortably.
    pub(crate) fn magnitude(&self) -> u128 {
        let mut m: u128 = 1 << self.two;
        for &p in &self.odd {
            m *= p as u128;
        }
        m
    }

    fn r_value(&self) -> ExactRational {
        let mut pairs: Vec<(u64, u32)> = Vec::new();
        if self.two > 0 {
            pairs.push((2, self.two));
        }
        for &p in &self.odd {
            pairs.push((p, 1));
        }
        r_from_pairs(&pairs)
    }

    /// r(lcm(2, D)): forces at least one factor of 2.
    fn r_lcm2(&self) -> ExactRational {
        let mut pairs: Vec<(u64, u32)> = vec![(2, self.two.max(1))];
        for &p in &self.odd {
            pairs.push((p, 1));
        }
        r_from_pairs(&pairs)
    }

    /// e(x) = 3/10 for odd discriminant, 1 for even.
    fn e_value(&self) -> ExactRational {
        if self.is_odd() {
            Ratio::new(big(3), big(10))
        } else {
            ExactRational::one()
        }
    }
}

/// e(x) = 3/10 if the discriminant of Q(sqrt(x)) is odd, else 1.
pub fn e_factor(x: &NonzeroRational) -> Result<ExactRational> {
    Ok(DiscParts::of(&factor_rational(x)?).e_value())
}

/// Exact correction factor c for a multiplicatively independent pair with
/// torsionfree quotient. The density of primes p for which b mod p lies in
/// the subgroup generated by a mod p is c * S.
pub fn c_torsionfree(a: &NonzeroRational, b: &NonzeroRational) -> Result<ExactRational> {
    match torsion_order(a, b)? {
        1 => {}
        t => return Err(Error::NotTorsionfree(t)),
    }
    let fa = factor_rational(a)?;
    let fb = factor_rational(b)?;
    let fab = fa.mul(&fb);
    let da = DiscParts::of(&fa);
    let db = DiscParts::of(&fb);
    let dab = DiscParts::of(&fab);
    let c = ExactRational::one()
        + da.r_lcm2()
        + db.e_value() * db.r_value()
        + dab.e_value() * dab.r_value();
    // c * S is a density, so c > 0 always; anything else is a bug.
    assert!(c.is_positive(), "correction factor must be positive");
    Ok(c)
}

/// Density of the pair as an exact multiple of S.
pub fn delta_exact(a: &NonzeroRational, b: &NonzeroRational) -> Result<SMultiple> {
    Ok(SMultiple::new(c_torsionfree(a, b)?))
}

/// Closed form of the double sum sum_{m | i, mn | ij} mu(j) / (i^2 j phi(ij))
/// as a multiple of S:
///
/// ```text
/// S_{m,n} = S / (m^3 n^3)
///         * prod_{p | n} (-p^4) / (p^3 - p - 1)
///         * prod_{p | m, p not| n} (p^3 + p^2) / (p^3 - p - 1)
/// ```
pub fn smn_closed(m: u64, n: u64) -> Result<SMultiple> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("smn_closed needs m, n >= 1".into()));
    }
    let mut coeff = Ratio::new(
        BigInt::one(),
        BigInt::from(m).pow(3) * BigInt::from(n).pow(3),
    );
    let n_primes: Vec<u64> = factor_u64(n)?.into_iter().map(|(p, _)| p).collect();
    for &p in &n_primes {
        let pb = BigInt::from(p);
        coeff *= Ratio::new(-pb.pow(4), cubic_den(p));
    }
    for (p, _) in factor_u64(m)? {
        if !n_primes.contains(&p) {
            let pb = BigInt::from(p);
            coeff *= Ratio::new(pb.pow(3) + pb.pow(2), cubic_den(p));
        }
    }
    Ok(SMultiple::new(coeff))
}

/// Parity-restricted variant (even i, odd j): (3/10) r(n) S for odd n and
/// r(n) S when 4 | n. No closed form exists for n = 2 mod 4.
pub fn s2n_prime(n: u64) -> Result<SMultiple> {
    if n == 0 {
        return Err(Error::InvalidInput("s2n_prime needs n >= 1".into()));
    }
    let r = r_from_pairs(&factor_u64(n)?);
    let coeff = match n % 4 {
        2 => return Err(Error::UnsupportedResidue(n)),
        0 => r,
        _ => Ratio::new(big(3), big(10)) * r,
    };
    Ok(SMultiple::new(coeff))
}

/// The three even-level entanglement divisors |D(a)|, |D(b)|, |D(ab)| plus
/// the odd-level divisor lcm(2, |D(a)|), precomputed for degree formulas.
pub(crate) struct DiscSet {
    /// lcm(2, |D(a)|).
    pub la: u128,
    /// {1, |D(a)|, |D(b)|, |D(ab)|} with multiplicity.
    pub even_divs: [u128; 4],
}

impl DiscSet {
    pub(crate) fn new(a: &NonzeroRational, b: &NonzeroRational) -> Result<DiscSet> {
        match torsion_order(a, b)? {
            1 => {}
            t => return Err(Error::NotTorsionfree(t)),
        }
        let fa = factor_rational(a)?;
        let fb = factor_rational(b)?;
        let fab = fa.mul(&fb);
        let da = DiscParts::of(&fa).magnitude();
        let db = DiscParts::of(&fb).magnitude();
        let dab = DiscParts::of(&fab).magnitude();
        let la = if da % 2 == 0 { da } else { 2 * da };
        Ok(DiscSet {
            la,
            even_divs: [1, da, db, dab],
        })
    }

    /// Number of divisors of ij among the degree-halving set attached to
    /// the parity of i. Always in {1, 2, 4} and divides 4.
    pub(crate) fn f(&self, i_even: bool, ij: u128) -> u32 {
        if i_even {
            self.even_divs
                .iter()
                .filter(|&&x| x <= ij && ij % x == 0)
                .count() as u32
        } else if self.la <= ij && ij % self.la == 0 {
            2
        } else {
            1
        }
    }
}

/// Degree-loss factor f_{i,j} for the composite of the i-th Kummer and
/// ij-th cyclotomic layers of the pair.
pub fn f_degree_loss(i: u64, j: u64, a: &NonzeroRational, b: &NonzeroRational) -> Result<u32> {
    if i == 0 || j == 0 {
        return Err(Error::InvalidInput("levels must be >= 1".into()));
    }
    let set = DiscSet::new(a, b)?;
    Ok(set.f(i % 2 == 0, i as u128 * j as u128))
}

/// Degree of the field obtained by adjoining the ij-th roots of unity and
/// the i-th roots of a and b: i^2 j phi(ij) / f_{i,j}.
pub fn field_degree(i: u64, j: u64, a: &NonzeroRational, b: &NonzeroRational) -> Result<u128> {
    const CAP: u64 = 1 << 31;
    if i == 0 || j == 0 {
        return Err(Error::InvalidInput("levels must be >= 1".into()));
    }
    if i > CAP || j > CAP {
        return Err(Error::ValueOutOfRange(format!(
            "levels above {CAP} overflow the degree computation"
        )));
    }
    let f = f_degree_loss(i, j, a, b)? as u128;
    let num = (i as u128) * (i as u128) * (j as u128) * phi_of_product(i, j)?;
    debug_assert!(num % f == 0, "degree loss must divide the naive degree");
    Ok(num / f)
}

/// phi(i * j) = phi(i) phi(j) g / phi(g) with g = gcd(i, j).
pub(crate) fn phi_of_product(i: u64, j: u64) -> Result<u128> {
    let g = gcd_u64(i, j);
    Ok(euler_phi(i)? as u128 * euler_phi(j)? as u128 * g as u128 / euler_phi(g)? as u128)
}

/// Degree of Q(zeta_j, a^(1/j1)) for j1 | j and a single generator a whose
/// quotient Q*/<-1, a> is torsionfree: j1 phi(j), halved exactly when j1 is
/// even and D(a) | j.
pub fn degree_single(a: &NonzeroRational, j: u64, j1: u64) -> Result<u128> {
    if j == 0 || j1 == 0 {
        return Err(Error::InvalidInput("levels must be >= 1".into()));
    }
    if j % j1 != 0 {
        return Err(Error::NotDivisor { divisor: j1, of: j });
    }
    let f = factor_rational(a)?;
    single_torsionfree_check(&f)?;
    let d = DiscParts::of(&f).magnitude();
    let naive = j1 as u128 * euler_phi(j)? as u128;
    if j1 % 2 == 0 && (j as u128) % d == 0 {
        Ok(naive / 2)
    } else {
        Ok(naive)
    }
}

/// Q*/<-1, a> is torsionfree iff the exponents of a are coprime (or a is
/// +-1, where the quotient is all of Q*/{+-1}); squares are the order-2
/// obstruction surfaced separately.
pub(crate) fn single_torsionfree_check(f: &FactoredRational) -> Result<()> {
    if f.is_square() {
        return Err(Error::SquareInput);
    }
    let mut g: u64 = 0;
    for &e in f.exponents().values() {
        g = gcd_u64(g, e.unsigned_abs() as u64);
    }
    if g > 1 {
        return Err(Error::NotTorsionfree(g));
    }
    Ok(())
}
