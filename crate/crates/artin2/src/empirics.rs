// SPDX-License-Identifier: Apache-2.0

//! Exact membership statistics over prime ranges.
//!
//! For a prime p dividing no numerator or denominator of the pair, both
//! rationals reduce into the cyclic group (Z/p)*, where
//!
//! ```text
//! b in <a> mod p   <=>   ord_p(b) | ord_p(a),
//! ```
//!
//! since a cyclic group has exactly one subgroup per order. Orders come
//! from factoring p - 1 once per prime and stripping prime factors off
//! the group exponent, so every count here is exact, not sampled.
//!
//! Ranges are scanned in fixed-size chunks that rayon distributes across
//! threads; per-chunk tallies are integers, so totals are identical for
//! every thread count. Observation dumps write rows in ascending p by
//! walking chunks sequentially and parallelizing only inside the chunk.

use std::io::Write;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::constants;
use crate::density::{c_torsionfree, ratio_to_f64, ExactRational};
use crate::error::{Error, Result};
use crate::primes::{is_prime_u64, mulmod, powmod, PrimeTools};
use crate::rational::{classify_pair, NonzeroRational};

/// Everything recorded about one usable prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeObservation {
    pub p: u64,
    pub ord_a: u64,
    pub ord_b: u64,
    /// Index of <a mod p> in (Z/p)*: (p - 1) / ord_a.
    pub index_a: u64,
    pub index_b: u64,
    pub member: bool,
}

/// Aggregate of a range scan, together with the closed-form prediction
/// when the pair admits one.
#[derive(Clone, Debug)]
pub struct CountReport {
    pub a: NonzeroRational,
    pub b: NonzeroRational,
    pub lo: u64,
    pub hi: u64,
    /// Primes in [lo, hi] with good reduction for both inputs; the
    /// denominator of `observed_ratio`.
    pub primes_considered: u64,
    pub members: u64,
    /// Primes in range dividing some numerator or denominator, excluded
    /// from the statistics.
    pub skipped: u64,
    pub observed_ratio: f64,
    /// c such that the predicted density is c * S; None when the pair is
    /// dependent or has torsion, where no closed form is provided.
    pub predicted_coefficient: Option<ExactRational>,
    pub predicted_value: Option<f64>,
    /// observed_ratio / S, directly comparable against c.
    pub ratio_over_s: f64,
}

impl CountReport {
    /// Stable JSON rendering; ratios are fixed 10-decimal strings so the
    /// output does not depend on float formatting quirks.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a.to_string(),
            "b": self.b.to_string(),
            "lo": self.lo,
            "hi": self.hi,
            "primes_considered": self.primes_considered,
            "members": self.members,
            "skipped": self.skipped,
            "observed_ratio": format!("{:.10}", self.observed_ratio),
            "predicted_coefficient": self.predicted_coefficient.as_ref().map(|c| c.to_string()),
            "predicted_value": self.predicted_value.map(|v| format!("{:.10}", v)),
            "ratio_over_S": format!("{:.10}", self.ratio_over_s),
        })
    }
}

/// Observed frequency of the local membership condition at one prime q,
/// next to its heuristic value.
#[derive(Clone, Copy, Debug)]
pub struct PerQFraction {
    pub q: u64,
    /// Fraction of usable primes with v_q(index_a) <= v_q(index_b); the
    /// conjunction of this condition over all q is membership.
    pub observed: f64,
    /// 1 - q / (q^3 - 1), the density the condition holds with for a
    /// generic pair.
    pub generic: f64,
    pub primes_considered: u64,
}

/// Shared factoring tables, sized once from `ARTIN2_SPF_CEILING` (falls
/// back to the built-in ceiling). Lazily built on first use.
fn tools() -> &'static PrimeTools {
    static TOOLS: OnceLock<PrimeTools> = OnceLock::new();
    TOOLS.get_or_init(|| PrimeTools::new(PrimeTools::ceiling_from_env()))
}

/// Primes in [lo, hi] ascending, under the configured ceiling.
pub fn sieve_primes(lo: u64, hi: u64) -> Result<Vec<u64>> {
    tools().primes_in(lo, hi)
}

/// Prime factor multiset of n (ascending, with multiplicity).
pub fn spf_factorize(n: u64) -> Result<Vec<u64>> {
    tools().spf_factorize(n)
}

/// x mod p as an element of (Z/p)*; BadReduction if p divides the
/// numerator or denominator.
pub fn reduce_mod_p(x: &NonzeroRational, p: u64) -> Result<u64> {
    if p < 2 || p > i64::MAX as u64 {
        return Err(Error::ValueOutOfRange(format!(
            "modulus {p} outside the supported prime range"
        )));
    }
    let nm = x.numerator().unsigned_abs() % p;
    let dm = x.denominator().unsigned_abs() % p;
    if nm == 0 || dm == 0 {
        return Err(Error::BadReduction {
            value: x.to_string(),
            p,
        });
    }
    let nm = if x.numerator() < 0 { p - nm } else { nm };
    // Fermat inverse; p is prime for every caller in this module.
    Ok(mulmod(nm, powmod(dm, p - 2, p), p))
}

/// Order of x in (Z/p)* given the factorization of p - 1: start from the
/// group exponent and strip each prime while the power still fixes x.
fn order_from_factorization(x: u64, p: u64, fac: &[(u64, u32)]) -> u64 {
    debug_assert!(x >= 1 && x < p);
    let mut ord = p - 1;
    for &(q, _) in fac {
        while ord % q == 0 && powmod(x, ord / q, p) == 1 {
            ord /= q;
        }
    }
    ord
}

/// Multiplicative order of x mod p for prime p.
pub fn order_mod_p(x: &NonzeroRational, p: u64) -> Result<u64> {
    if !is_prime_u64(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let xr = reduce_mod_p(x, p)?;
    let fac = tools().factor_pairs(p - 1)?;
    Ok(order_from_factorization(xr, p, &fac))
}

/// Full record for one prime: both orders, both indices, membership.
pub fn observe(a: &NonzeroRational, b: &NonzeroRational, p: u64) -> Result<PrimeObservation> {
    if !is_prime_u64(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let ra = reduce_mod_p(a, p)?;
    let rb = reduce_mod_p(b, p)?;
    let fac = tools().factor_pairs(p - 1)?;
    let ord_a = order_from_factorization(ra, p, &fac);
    let ord_b = order_from_factorization(rb, p, &fac);
    Ok(PrimeObservation {
        p,
        ord_a,
        ord_b,
        index_a: (p - 1) / ord_a,
        index_b: (p - 1) / ord_b,
        member: ord_a % ord_b == 0,
    })
}

/// Whether b mod p lies in the subgroup generated by a mod p.
pub fn is_member(a: &NonzeroRational, b: &NonzeroRational, p: u64) -> Result<bool> {
    Ok(observe(a, b, p)?.member)
}

/// Primes whose reduction is undefined for x: divisors of the numerator
/// or denominator.
fn bad_primes(x: &NonzeroRational) -> [u64; 2] {
    [x.numerator().unsigned_abs(), x.denominator().unsigned_abs()]
}

fn divides_any(p: u64, masks: &[u64; 4]) -> bool {
    masks.iter().any(|&m| m % p == 0)
}

/// Chunk size for parallel scans; large enough to amortize dispatch,
/// small enough to keep dump memory flat.
const CHUNK: usize = 8192;

/// Scan all primes in [lo, hi] and report exact membership counts for
/// the pair, next to the closed-form prediction when one exists.
pub fn count_range(
    a: &NonzeroRational,
    b: &NonzeroRational,
    lo: u64,
    hi: u64,
) -> Result<CountReport> {
    let primes = tools().primes_in(lo, hi)?;
    let masks = range_masks(a, b);
    let tallies: Vec<(u64, u64, u64)> = primes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut considered = 0u64;
            let mut members = 0u64;
            let mut skipped = 0u64;
            for &p in chunk {
                if divides_any(p, &masks) {
                    skipped += 1;
                    continue;
                }
                let obs = observe_unchecked(a, b, p)?;
                considered += 1;
                if obs.member {
                    members += 1;
                }
            }
            Ok::<_, Error>((considered, members, skipped))
        })
        .collect::<Result<_>>()?;
    let (primes_considered, members, skipped) = tallies
        .into_iter()
        .fold((0, 0, 0), |(c, m, s), (dc, dm, ds)| (c + dc, m + dm, s + ds));

    let observed_ratio = if primes_considered > 0 {
        members as f64 / primes_considered as f64
    } else {
        0.0
    };
    let predicted_coefficient = if classify_pair(a, b)?.torsionfree() {
        Some(c_torsionfree(a, b)?)
    } else {
        None
    };
    let predicted_value = predicted_coefficient
        .as_ref()
        .map(|c| ratio_to_f64(c) * constants::s_f64());
    Ok(CountReport {
        a: *a,
        b: *b,
        lo,
        hi,
        primes_considered,
        members,
        skipped,
        observed_ratio,
        predicted_coefficient,
        predicted_value,
        ratio_over_s: observed_ratio / constants::s_f64(),
    })
}

fn range_masks(a: &NonzeroRational, b: &NonzeroRational) -> [u64; 4] {
    let [an, ad] = bad_primes(a);
    let [bn, bd] = bad_primes(b);
    [an, ad, bn, bd]
}

/// `observe` without the primality recheck, for scan loops that already
/// iterate over sieved primes with good reduction.
fn observe_unchecked(
    a: &NonzeroRational,
    b: &NonzeroRational,
    p: u64,
) -> Result<PrimeObservation> {
    let ra = reduce_mod_p(a, p)?;
    let rb = reduce_mod_p(b, p)?;
    let fac = tools().factor_pairs(p - 1)?;
    let ord_a = order_from_factorization(ra, p, &fac);
    let ord_b = order_from_factorization(rb, p, &fac);
    Ok(PrimeObservation {
        p,
        ord_a,
        ord_b,
        index_a: (p - 1) / ord_a,
        index_b: (p - 1) / ord_b,
        member: ord_a % ord_b == 0,
    })
}

fn v_adic(mut n: u64, q: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n % q == 0 {
        n /= q;
        v += 1;
    }
    v
}

/// Observed frequency of the local condition v_q(index_a) <= v_q(index_b)
/// across usable primes in [lo, hi].
pub fn per_q_fraction(
    a: &NonzeroRational,
    b: &NonzeroRational,
    q: u64,
    lo: u64,
    hi: u64,
) -> Result<PerQFraction> {
    if !is_prime_u64(q) {
        return Err(Error::InvalidInput(format!("q = {q} is not prime")));
    }
    if q > 1 << 20 {
        return Err(Error::ValueOutOfRange(
            "local prime q above 2^20 is not supported".into(),
        ));
    }
    let primes = tools().primes_in(lo, hi)?;
    let masks = range_masks(a, b);
    let tallies: Vec<(u64, u64)> = primes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut hits = 0u64;
            let mut total = 0u64;
            for &p in chunk {
                if divides_any(p, &masks) {
                    continue;
                }
                let obs = observe_unchecked(a, b, p)?;
                total += 1;
                if v_adic(obs.index_a, q) <= v_adic(obs.index_b, q) {
                    hits += 1;
                }
            }
            Ok::<_, Error>((hits, total))
        })
        .collect::<Result<_>>()?;
    let (hits, total) = tallies
        .into_iter()
        .fold((0u64, 0u64), |(h, t), (dh, dt)| (h + dh, t + dt));
    let qf = q as f64;
    Ok(PerQFraction {
        q,
        observed: if total > 0 { hits as f64 / total as f64 } else { 0.0 },
        generic: 1.0 - qf / (qf * qf * qf - 1.0),
        primes_considered: total,
    })
}

/// Write one CSV row per usable prime in [lo, hi], ascending, and return
/// the number of rows. Header: `p,ord_a,ord_b,index_a,index_b,member`;
/// member is 0/1; lines end with LF.
pub fn dump_observations(
    a: &NonzeroRational,
    b: &NonzeroRational,
    lo: u64,
    hi: u64,
    sink: &mut dyn Write,
) -> Result<u64> {
    let primes = tools().primes_in(lo, hi)?;
    let masks = range_masks(a, b);
    sink.write_all(b"p,ord_a,ord_b,index_a,index_b,member\n")?;
    let mut rows = 0u64;
    // Sequential over chunks keeps rows ascending and memory bounded;
    // parallel inside the chunk does the actual order computations.
    for chunk in primes.chunks(CHUNK) {
        let observations: Vec<Option<PrimeObservation>> = chunk
            .par_iter()
            .map(|&p| {
                if divides_any(p, &masks) {
                    return Ok(None);
                }
                observe_unchecked(a, b, p).map(Some)
            })
            .collect::<Result<_>>()?;
        for obs in observations.into_iter().flatten() {
            writeln!(
                sink,
                "{},{},{},{},{},{}",
                obs.p,
                obs.ord_a,
                obs.ord_b,
                obs.index_a,
                obs.index_b,
                obs.member as u8
            )?;
            rows += 1;
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> NonzeroRational {
        NonzeroRational::new(n, d).unwrap()
    }

    #[test]
    fn orders_match_hand_computation() {
        // (Z/7)*: 2 has order 3 ({2, 4, 1}), 3 has order 6, 5 has order 6.
        assert_eq!(order_mod_p(&q(2, 1), 7).unwrap(), 3);
        assert_eq!(order_mod_p(&q(3, 1), 7).unwrap(), 6);
        assert_eq!(order_mod_p(&q(5, 1), 7).unwrap(), 6);
        // 1/2 mod 7 = 4, order 3.
        assert_eq!(order_mod_p(&q(1, 2), 7).unwrap(), 3);
        // Negative values reduce with their sign: -1 has order 2.
        assert_eq!(order_mod_p(&q(-1, 1), 7).unwrap(), 2);
    }

    #[test]
    fn membership_matches_direct_powers() {
        // 4 = 2^2 lies in <2> everywhere; mod 7 the subgroup {2, 4, 1}
        // misses 5.
        assert!(is_member(&q(2, 1), &q(4, 1), 7).unwrap());
        assert!(!is_member(&q(2, 1), &q(5, 1), 7).unwrap());
        // 3 is a primitive root mod 7, so everything reduces into <3>.
        assert!(is_member(&q(3, 1), &q(1, 2), 7).unwrap());
    }

    #[test]
    fn membership_agrees_with_subgroup_enumeration() {
        let pairs = [
            (q(2, 1), q(5, 1)),
            (q(3, 2), q(2, 1)),
            (q(-7, 8), q(-3, 4)),
        ];
        for p in crate::primes::simple_sieve(200) {
            for (a, b) in &pairs {
                let (Ok(ra), Ok(rb)) = (reduce_mod_p(a, p), reduce_mod_p(b, p)) else {
                    continue;
                };
                // Enumerate <a> directly.
                let mut in_subgroup = false;
                let mut x = 1u64;
                loop {
                    if x == rb {
                        in_subgroup = true;
                    }
                    x = mulmod(x, ra, p);
                    if x == 1 {
                        break;
                    }
                }
                assert_eq!(
                    is_member(a, b, p).unwrap(),
                    in_subgroup,
                    "mismatch at p = {p} for ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn bad_reduction_is_reported_not_counted() {
        assert!(matches!(
            reduce_mod_p(&q(7, 2), 7),
            Err(Error::BadReduction { p: 7, .. })
        ));
        assert!(matches!(
            reduce_mod_p(&q(3, 7), 7),
            Err(Error::BadReduction { p: 7, .. })
        ));
        let report = count_range(&q(-7, 8), &q(-3, 4), 7, 100).unwrap();
        // p = 7 divides the numerator of a; 2 and 3 are below the range.
        // [7, 100] holds 22 primes.
        assert_eq!(report.skipped, 1);
        assert_eq!(report.primes_considered + report.skipped, 22);
    }

    #[test]
    fn small_range_counts_are_exact() {
        // Hand count for (2, 5) over primes 7..=31: members are primes
        // where ord(2) is divisible by ord(5).
        let report = count_range(&q(2, 1), &q(5, 1), 7, 31).unwrap();
        assert_eq!(report.primes_considered, 8);
        assert_eq!(report.skipped, 0);
        let members: u64 = [7u64, 11, 13, 17, 19, 23, 29, 31]
            .iter()
            .filter(|&&p| is_member(&q(2, 1), &q(5, 1), p).unwrap())
            .count() as u64;
        assert_eq!(report.members, members);
        // Spot value: mod 11, ord(2) = 10 (2 is a primitive root), so 5
        // is a member.
        assert!(is_member(&q(2, 1), &q(5, 1), 11).unwrap());
    }

    #[test]
    fn prediction_fields_follow_classification() {
        let ok = count_range(&q(2, 1), &q(5, 1), 7, 100).unwrap();
        assert!(ok.predicted_coefficient.is_some());
        assert!(ok.predicted_value.unwrap() > 0.5);
        // Torsion pair: no closed form, but counting still works.
        let torsion = count_range(&q(8, 1), &q(5, 1), 7, 100).unwrap();
        assert!(torsion.predicted_coefficient.is_none());
        assert!(torsion.predicted_value.is_none());
        assert!(torsion.primes_considered > 0);
        // Dependent pair: same.
        let dep = count_range(&q(2, 1), &q(4, 1), 7, 100).unwrap();
        assert!(dep.predicted_coefficient.is_none());
        assert!(dep.observed_ratio > 0.9, "powers of a are almost always members");
    }

    #[test]
    fn report_json_shape_is_stable() {
        let report = count_range(&q(2, 1), &q(5, 1), 7, 100).unwrap();
        let v = report.to_json();
        for key in [
            "a",
            "b",
            "lo",
            "hi",
            "primes_considered",
            "members",
            "skipped",
            "observed_ratio",
            "predicted_coefficient",
            "predicted_value",
            "ratio_over_S",
        ] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(v["a"], "2");
        assert_eq!(v["predicted_coefficient"], "9343/9520");
        let ratio: f64 = v["observed_ratio"].as_str().unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&ratio));
    }

    #[test]
    fn dump_is_ascending_and_counts_rows() {
        let mut buf = Vec::new();
        let rows = dump_observations(&q(2, 1), &q(5, 1), 7, 100, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "p,ord_a,ord_b,index_a,index_b,member");
        let ps: Vec<u64> = lines
            .clone()
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(rows as usize, ps.len());
        // [7, 100] holds 22 primes and none divide 2 or 5.
        assert_eq!(rows, 22);
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ps.first(), Some(&7));
        // First row spelled out: mod 7 ord(2) = 3, ord(5) = 6, indices 2
        // and 1, not a member.
        assert_eq!(lines.next().unwrap(), "7,3,6,2,1,0");
    }

    #[test]
    fn per_q_requires_prime_q() {
        assert!(per_q_fraction(&q(2, 1), &q(5, 1), 4, 7, 100).is_err());
        let f = per_q_fraction(&q(2, 1), &q(5, 1), 3, 7, 1000).unwrap();
        assert!((f.generic - (1.0 - 3.0 / 26.0)).abs() < 1e-12);
        assert!(f.observed > 0.5 && f.observed <= 1.0);
        assert_eq!(f.q, 3);
    }

    #[test]
    fn nonprime_modulus_is_rejected() {
        assert!(order_mod_p(&q(2, 1), 10).is_err());
        assert!(observe(&q(2, 1), &q(5, 1), 1).is_err());
    }

    #[test]
    fn sieve_and_factor_wrappers() {
        assert_eq!(
            sieve_primes(7, 30).unwrap(),
            vec![7, 11, 13, 17, 19, 23, 29]
        );
        assert_eq!(spf_factorize(96).unwrap(), vec![2, 2, 2, 2, 2, 3]);
        assert!(sieve_primes(28, 24).unwrap().is_empty());
    }

    #[test]
    fn membership_three_ways_agree() {
        // member <=> ord_b | ord_a <=> b^(ord_a) = 1 <=> the q-adic
        // valuation of index_a is at most that of index_b for every
        // q | p - 1. Three independent readings of the same subgroup
        // condition.
        let a = q(2, 1);
        let b = q(5, 1);
        for p in crate::primes::simple_sieve(2000) {
            if p <= 5 {
                continue;
            }
            let obs = observe(&a, &b, p).unwrap();
            let rb = reduce_mod_p(&b, p).unwrap();
            let via_power = powmod(rb, obs.ord_a, p) == 1;
            let via_valuations = tools()
                .factor_pairs(p - 1)
                .unwrap()
                .iter()
                .all(|&(qq, _)| v_adic(obs.index_a, qq) <= v_adic(obs.index_b, qq));
            assert_eq!(obs.member, via_power, "power form disagrees at p = {p}");
            assert_eq!(obs.member, via_valuations, "valuation form disagrees at p = {p}");
        }
    }

    #[test]
    fn counts_are_chunk_additive() {
        let a = q(2, 1);
        let b = q(5, 1);
        let whole = count_range(&a, &b, 7, 2000).unwrap();
        let left = count_range(&a, &b, 7, 999).unwrap();
        let right = count_range(&a, &b, 1000, 2000).unwrap();
        assert_eq!(whole.members, left.members + right.members);
        assert_eq!(
            whole.primes_considered,
            left.primes_considered + right.primes_considered
        );
        assert_eq!(whole.skipped, left.skipped + right.skipped);
    }

    #[test]
    fn per_q_is_one_when_q_exceeds_the_range() {
        // Indices are below p <= hi < q, so no index carries a factor q.
        let f = per_q_fraction(&q(2, 1), &q(5, 1), 101, 7, 100).unwrap();
        assert_eq!(f.observed, 1.0);
    }

    #[test]
    fn empty_range_yields_empty_report_and_dump() {
        let report = count_range(&q(2, 1), &q(5, 1), 24, 28).unwrap();
        assert_eq!(report.primes_considered, 0);
        assert_eq!(report.members, 0);
        assert_eq!(report.observed_ratio, 0.0);
        let mut buf = Vec::new();
        let rows = dump_observations(&q(2, 1), &q(5, 1), 24, 28, &mut buf).unwrap();
        assert_eq!(rows, 0);
        assert_eq!(buf, b"p,ord_a,ord_b,index_a,index_b,member\n");
    }
}
