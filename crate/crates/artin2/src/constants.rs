// SPDX-License-Identifier: Apache-2.0

//! Certified evaluation of the universal constant
//!
//! ```text
//! S = prod_p (1 - p / (p^3 - 1)) = 0.57595 99688 ...
//! ```
//!
//! Two independent routes are provided. The Euler product itself
//! ([`s_product`]) converges like 1/B and serves as a cross-check. The
//! fast route ([`s_series`]) rewrites -log S as an integer-weighted sum of
//! log zeta values,
//!
//! ```text
//! -log S = -log zeta(3) + sum_{d >= 2} e_d log zeta(d),
//! ```
//!
//! where the integers e_d = (1/d) sum_{k | d} a_k mu(d/k) come from the
//! Perrin sequence a_1 = 0, a_2 = 2, a_3 = 3, a_{k+3} = a_{k+1} + a_k
//! (OEIS A001608; tr M^k for the companion matrix of X^3 - X - 1, which is
//! why the e_d are integers and why p | a_p for prime p). With
//! rho = 1.3247... the real root of X^3 = X + 1, a_k <= 2 rho^k, so
//! |e_d| <= 2.03 rho^d / d for d >= 40 and log zeta(d) <= 2^(1-d): the
//! series tail shrinks geometrically like (rho/2)^d and 50 digits need a
//! few hundred terms.
//!
//! Each zeta value is computed by Euler-Maclaurin summation with exact
//! Bernoulli rationals; the remainder after K correction terms is bounded
//! by the first omitted term (the integrand is completely monotone), and
//! (N, K) are chosen by comparing that exact rational bound against the
//! working-precision target. All rounding flows through the ulp ledger of
//! [`crate::precision::Fx`], so every published error bound is a bound,
//! not an estimate.

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::precision::{bernoulli_even, to_decimal, DecimalValue, Fx};
use crate::primes::segmented_primes;

/// Upper bound on the plastic ratio rho (real root of X^3 = X + 1),
/// used only inside decreasing tail bounds.
const RHO_UP: f64 = 1.324_717_96;

/// Perrin number a_k: a_1 = 0, a_2 = 2, a_3 = 3, a_{k+3} = a_{k+1} + a_k.
pub fn ak(k: u64) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidInput("Perrin index starts at 1".into()));
    }
    if k > 100_000 {
        return Err(Error::ValueOutOfRange("Perrin index above 10^5".into()));
    }
    let mut window = [
        BigUint::zero(),
        BigUint::from(2u32),
        BigUint::from(3u32),
    ];
    if k <= 3 {
        return Ok(window[(k - 1) as usize].clone());
    }
    for _ in 3..k {
        let next = &window[1] + &window[0];
        window.rotate_left(1);
        window[2] = next;
    }
    Ok(window[2].clone())
}

/// Exponent e_d of zeta(d) in the product expansion of 1/S:
/// e_d = (1/d) sum_{k | d} a_k mu(d/k). Always an integer.
pub fn ed(d: u64) -> Result<BigInt> {
    if d < 2 {
        return Err(Error::InvalidInput("exponents start at d = 2".into()));
    }
    if d > 100_000 {
        return Err(Error::ValueOutOfRange("exponent index above 10^5".into()));
    }
    // Perrin values up to d in one pass.
    let mut a: Vec<BigInt> = vec![BigInt::zero(); (d + 1) as usize];
    if d >= 2 {
        a[2] = BigInt::from(2);
    }
    if d >= 3 {
        a[3] = BigInt::from(3);
    }
    for k in 4..=d as usize {
        a[k] = &a[k - 2] + &a[k - 3];
    }
    let mut sum = BigInt::zero();
    for k in 1..=d {
        if d % k == 0 {
            let mu = crate::density::moebius(d / k)?;
            sum += BigInt::from(mu) * &a[k as usize];
        }
    }
    let (q, r) = num_integer::Integer::div_rem(&sum, &BigInt::from(d));
    assert!(r.is_zero(), "e_d failed integrality at d = {d}");
    Ok(q)
}

const ZETA_N_MIN: u64 = 64;
const ZETA_N_MAX: u64 = 1 << 17;
const ZETA_K_MAX: usize = 64;

/// Exact Euler-Maclaurin remainder bound |T_(K+1)| for zeta(d) with cutoff
/// N and K correction terms: |B_(2K+2)|/(2K+2)! * prod_{i=0}^{2K} (d+i)
/// / N^(d+2K+1). Valid because the summand is completely monotone.
fn em_remainder(d: u32, n: u64, k: usize) -> Ratio<BigInt> {
    let b = &bernoulli_even()[k + 1]; // B_(2k+2)
    let mut fact = BigInt::one();
    for i in 2..=(2 * k + 2) {
        fact *= BigInt::from(i);
    }
    let mut rising = BigInt::one();
    for i in 0..=(2 * k) as u64 {
        rising *= BigInt::from(d as u64 + i);
    }
    let npow = BigInt::from(n).pow(d + 2 * k as u32 + 1);
    let mut r = b.clone();
    if r.is_negative() {
        r = -r;
    }
    r * Ratio::new(rising, fact * npow)
}

/// zeta(d) at the given scale. Returns (value, error in ulps); the error
/// bound is rigorous, combining per-operation rounding, skipped sub-ulp
/// terms, and the exact Euler-Maclaurin remainder.
pub(crate) fn zeta_fx(d: u32, scale: u32) -> (Fx, u64) {
    assert!(d >= 2);
    let eps = Ratio::new(BigInt::one(), BigInt::one() << (scale - 4));
    // Smallest (N, K) whose exact remainder bound clears the target.
    let mut chosen: Option<(u64, usize)> = None;
    let mut n = ZETA_N_MIN;
    while n <= ZETA_N_MAX {
        if em_remainder(d, n, ZETA_K_MAX) <= eps {
            for k in 1..=ZETA_K_MAX {
                if em_remainder(d, n, k) <= eps {
                    chosen = Some((n, k));
                    break;
                }
            }
            break;
        }
        n *= 2;
    }
    let (n, k) = chosen.expect("zeta cutoff search exhausted; scale beyond supported range");

    let mut sum = Fx::zero(scale);
    let mut ops: u64 = 0;
    // Direct part: sum_{m < N} m^-d. Terms below 2^-(scale+26) are skipped:
    // the summand decreases in m, and N <= 2^17 of them total under an ulp.
    let skip_threshold = (scale as u64 + 26) as f64;
    for m in 1..n {
        if m > 1 && d as f64 * (m as f64).log2() > skip_threshold {
            ops += 2;
            break;
        }
        let den = BigInt::from(m).pow(d);
        sum = sum.add(&Fx::from_ratio(&BigInt::one(), &den, scale));
        ops += 1;
    }
    // Integral term N^(1-d)/(d-1) and boundary term 1/(2 N^d).
    let npow = BigInt::from(n).pow(d - 1);
    sum = sum.add(&Fx::from_ratio(
        &BigInt::one(),
        &(&npow * BigInt::from(d - 1)),
        scale,
    ));
    sum = sum.add(&Fx::from_ratio(
        &BigInt::one(),
        &(&npow * BigInt::from(2 * n)),
        scale,
    ));
    ops += 2;
    // Correction terms T_j = B_(2j)/(2j)! * prod_{i=0}^{2j-2}(d+i)
    //                        / N^(d+2j-1), j = 1..K, exact then rounded.
    let mut fact = BigInt::from(2); // (2j)! at j = 1
    let mut rising = BigInt::from(d); // prod at j = 1 (single factor d)
    let mut npow_corr = BigInt::from(n).pow(d + 1);
    let n2 = BigInt::from(n * n);
    for j in 1..=k {
        let b = &bernoulli_even()[j];
        let t = b * Ratio::new(rising.clone(), &fact * &npow_corr);
        sum = sum.add(&Fx::from_ratio(t.numer(), t.denom(), scale));
        ops += 1;
        if j < k {
            // Advance (2j)! -> (2j+2)!, prod -> prod*(d+2j-1)(d+2j),
            // N^(d+2j-1) -> N^(d+2j+1).
            let tj = 2 * j as u64;
            fact *= BigInt::from((tj + 1) * (tj + 2));
            rising *= BigInt::from(d as u64 + tj - 1) * BigInt::from(d as u64 + tj);
            npow_corr *= &n2;
        }
    }
    // Remainder (< eps = 16 ulps) plus half-ulp roundings and skip slack.
    (sum, ops / 2 + 32)
}

fn validate_target(target_error: f64) -> Result<u32> {
    if !(1e-260..=0.1).contains(&target_error) {
        return Err(Error::ValueOutOfRange(
            "target error must lie in [1e-260, 0.1]".into(),
        ));
    }
    Ok((-target_error.log2()).ceil() as u32 + 1)
}

/// zeta(d) with a certified absolute error bound.
pub fn zeta(d: u32, target_error: f64) -> Result<DecimalValue> {
    if d < 2 {
        return Err(Error::InvalidInput("zeta evaluator needs d >= 2".into()));
    }
    let eps_bits = validate_target(target_error)?;
    let scale = eps_bits + 40;
    let (v, ulps) = zeta_fx(d, scale);
    // ulps <= 2^18 by the cutoff caps, so the slack below never fails.
    assert!((ulps as f64).log2() < (scale - eps_bits - 1) as f64);
    Ok(to_decimal(&v, target_error / 2.0))
}

/// Tail of the exponent series past D, in bits: log2 of
/// sum_{d > D} |e_d| log zeta(d) <= 4.06/(D+1) * (rho/2)^(D+1) / (1 - rho/2).
fn series_tail_bits(big_d: u32) -> f64 {
    let ratio_bits = (RHO_UP / 2.0).log2(); // negative
    (4.06f64).log2() - ((big_d + 1) as f64).log2() + (big_d as f64 + 1.0) * ratio_bits
        - (1.0 - RHO_UP / 2.0).log2()
}

/// -log S at 2^-eps_bits absolute accuracy. Returns (value, scale).
pub(crate) fn minus_log_s_fx(eps_bits: u32) -> (Fx, u32) {
    // |e_d| <= 2.03 rho^d / d holds for d >= 40; starting the tail at
    // D >= 48 keeps every discarded index inside the proven range.
    let mut big_d: u32 = 48;
    while series_tail_bits(big_d) > -((eps_bits + 2) as f64) {
        big_d += 8;
    }
    // Working scale absorbs the rho^d growth of the e_d against the ulp
    // ledger: sum_d |e_d| * (per-term ulps) stays near rho^D * poly.
    let scale = eps_bits + 80 + (big_d as f64 * 0.406).ceil() as u32;

    let terms: Vec<(BigInt, Fx, u64)> = (2..=big_d as u64)
        .into_par_iter()
        .map(|d| {
            let e = ed(d).expect("e_d in range");
            if e.is_zero() {
                return (e, Fx::zero(scale), 0);
            }
            let (z, zu) = zeta_fx(d as u32, scale);
            let (l, lu) = z.ln();
            // d(ln x)/dx = 1/x <= 1 on x >= 1: zeta ulps carry through.
            (e, l, zu + lu + 4)
        })
        .collect();

    let mut acc = Fx::zero(scale);
    let mut ulps = BigUint::zero();
    for (e, l, u) in &terms {
        if e.is_zero() {
            continue;
        }
        acc = acc.add(&l.mul_int(e)); // exact
        ulps += e.magnitude() * BigUint::from(*u);
    }
    // Subtract log zeta(3) (its exponent in -log S is e_3 - 1).
    let (z3, zu3) = zeta_fx(3, scale);
    let (l3, lu3) = z3.ln();
    acc = acc.sub(&l3);
    ulps += BigUint::from(zu3 + lu3 + 4);

    // Certified: rounding ledger must sit at least 2 bits under the target
    // together with the series tail chosen above.
    assert!(
        ulps.bits() as u32 + eps_bits + 2 <= scale,
        "rounding ledger exceeded the reserved margin"
    );
    (acc, scale)
}

/// S itself at 2^-eps_bits absolute accuracy. Returns (value, scale).
pub(crate) fn s_fx(eps_bits: u32) -> (Fx, u32) {
    let (l, scale) = minus_log_s_fx(eps_bits + 4);
    let (s, exp_ulps) = l.neg().exp();
    // |dS| <= S |dL| <= 0.6 * 2^-(eps_bits+4); exp adds its own ulps.
    assert!((exp_ulps as f64).log2() < (scale - eps_bits - 2) as f64);
    (s, scale)
}

/// -log S with a certified error bound.
pub fn log_s(target_error: f64) -> Result<DecimalValue> {
    let eps_bits = validate_target(target_error)?;
    let (v, _) = minus_log_s_fx(eps_bits + 1);
    Ok(to_decimal(&v, target_error / 2.0))
}

/// S via the zeta-product series, with a certified error bound.
pub fn s_series(target_error: f64) -> Result<DecimalValue> {
    let eps_bits = validate_target(target_error)?;
    let (v, _) = s_fx(eps_bits + 1);
    Ok(to_decimal(&v, target_error / 2.0))
}

/// S at f64 accuracy, cached for the lifetime of the process.
pub fn s_f64() -> f64 {
    use std::sync::OnceLock;
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| s_fx(70).0.to_f64())
}

/// First `digits` decimal digits of S, correctly rounded, as "0.d1d2...".
/// Rounding is certified: the computation is retried at higher precision
/// if the value sits too close to a rounding boundary.
pub fn s_digits(digits: usize) -> Result<String> {
    if digits == 0 || digits > 250 {
        return Err(Error::InvalidInput("supported digit counts are 1..=250".into()));
    }
    let mut eps_bits = ((digits as f64 + 12.0) * 3.322).ceil() as u32;
    for _ in 0..4 {
        let (v, scale) = s_fx(eps_bits);
        let ten = BigUint::from(10u32).pow(digits as u32);
        let t = v.m.magnitude() * &ten;
        let q = &t >> scale;
        let r = t - (&q << scale);
        let half = BigUint::one() << (scale - 1);
        let rounded = if r >= half { &q + 1u32 } else { q.clone() };
        // Certify: distance to the rounding boundary must exceed the
        // computation error 2^-eps_bits, scaled into the same units.
        let dist = if r >= half { r - &half } else { &half - &r };
        let err_units = (&ten << scale) >> eps_bits;
        if dist > err_units {
            assert!(rounded < ten, "S < 1 by construction");
            return Ok(format!("0.{:0>width$}", rounded.to_string(), width = digits));
        }
        eps_bits += 40;
    }
    Err(Error::ValueOutOfRange(
        "digit rounding could not be certified at supported precision".into(),
    ))
}

fn validate_prime_bound(prime_bound: u64) -> Result<()> {
    if !(2..=(1 << 31)).contains(&prime_bound) {
        return Err(Error::ValueOutOfRange(
            "prime bound must lie in [2, 2^31]".into(),
        ));
    }
    Ok(())
}

/// Shared Euler-product evaluation: multiplies `factor(p)` over all primes
/// p <= bound at 192 fractional bits, with `tail_bound` the proven bound
/// on the omitted p > bound part.
fn euler_product(
    prime_bound: u64,
    tail_bound: f64,
    factor: impl Fn(u64) -> (BigInt, BigInt),
) -> DecimalValue {
    const SCALE: u32 = 192;
    let mut acc = Fx::from_int(1, SCALE);
    let mut count: u64 = 0;
    const SEG: u64 = 1 << 21;
    let mut lo = 2u64;
    while lo <= prime_bound {
        let hi = prime_bound.min(lo + SEG - 1);
        for p in segmented_primes(lo, hi) {
            let (num, den) = factor(p);
            acc = acc.mul(&Fx::from_ratio(&num, &den, SCALE));
            count += 1;
        }
        lo = hi + 1;
    }
    let fp_error = (count as f64 + 4.0) * 2f64.powi(-(SCALE as i32) + 1);
    to_decimal(&acc, tail_bound + fp_error)
}

/// Partial Euler product for S over p <= prime_bound. Decreases with the
/// bound and exceeds S by at most the stated error.
pub fn s_product(prime_bound: u64) -> Result<DecimalValue> {
    validate_prime_bound(prime_bound)?;
    // 1 - p/(p^3-1) = (p^3-p-1)/(p^3-1); tail sum_{n>B} n/(n^3-1) <= 2/B.
    Ok(euler_product(prime_bound, 2.0 / prime_bound as f64, |p| {
        let p = BigInt::from(p);
        let cube = &p * &p * &p;
        (&cube - &p - 1, cube - 1)
    }))
}

/// Partial Euler product for the classical single-variable constant
/// A = prod_p (1 - 1/(p(p-1))) = 0.3739558..., provided as a neighboring
/// reference point (Stephens' constant machinery is analogous).
pub fn artin_a(prime_bound: u64) -> Result<DecimalValue> {
    validate_prime_bound(prime_bound)?;
    // Tail: sum_{n>B} 1/(n(n-1)) = 1/B exactly.
    Ok(euler_product(prime_bound, 1.0 / prime_bound as f64, |p| {
        let p = BigInt::from(p);
        let sq = &p * &p;
        (&sq - &p - 1, sq - p)
    }))
}
