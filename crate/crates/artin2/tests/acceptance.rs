// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate: one test per shipped criterion, tolerances pinned
//! inline. Each test prints a `criterion N:` line; cargo's own ok/FAILED
//! status is the pass/fail verdict.
//!
//! Criteria 6 and 7 are implemented exactly as stated and fail today:
//! the extremal bracket is false once negative rationals enter the
//! family, and a 500-term scan provably misses divisor primes whose
//! entry index exceeds 500. The failure output carries the
//! counterexamples; see the README for the analysis.

use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;

use artin2::constants::{ak, s_digits, s_f64, s_product};
use artin2::density::{c_torsionfree, delta_exact, smn_closed, ExactRational};
use artin2::empirics::{count_range, is_member, order_mod_p};
use artin2::error::Error;
use artin2::oracle::{delta_truncated, smn_truncated, TruncationWindow};
use artin2::rational::{torsion_order, NonzeroRational};
use artin2::recurrences::{classify, prime_divisors_of_sequence, DensityOutcome, RecurrenceSpec};

fn q(n: i64, d: i64) -> NonzeroRational {
    NonzeroRational::new(n, d).unwrap()
}

fn frac(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_artin2"))
        .args(args)
        .output()
        .expect("binary runs")
}

// ---------------------------------------------------------------- 1

/// Fifty certified digits from the CLI, grouped in fives, plus the
/// Euler-product cross-check at 10^6 against its stated tail bound.
#[test]
fn criterion_1_constant_reproduction() {
    const GROUPED: &str = "0.57595 99688 92945 43964 31633 75492 49669 25065 13967 17649";

    let started = Instant::now();
    let out = binary(&["constant", "--digits", "50"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.lines().any(|l| l == GROUPED),
        "criterion 1: FAIL - CLI output lacks the digit line:\n{text}"
    );
    assert!(started.elapsed().as_secs() < 60, "criterion 1: FAIL - over a minute");

    // Library route agrees with the CLI digit string.
    let plain: String = GROUPED.chars().filter(|c| *c != ' ').collect();
    assert_eq!(s_digits(50).unwrap(), plain);

    // Product cross-check: partial product at 10^6 exceeds S by at most
    // its reported bound, which sits near 2e-6.
    let prod = s_product(1_000_000).unwrap();
    assert!(prod.error_bound <= 3e-6, "tail bound {} too lax", prod.error_bound);
    assert!(
        (prod.approx() - s_f64()).abs() <= prod.error_bound,
        "criterion 1: FAIL - product {} vs series {}",
        prod.digits,
        s_f64()
    );
    println!("criterion 1: PASS - 50 digits grouped, product within {:.1e}", prod.error_bound);
}

// ---------------------------------------------------------------- 2

/// The two headline coefficients, exactly.
#[test]
fn criterion_2_exact_coefficients() {
    let c25 = c_torsionfree(&q(2, 1), &q(5, 1)).unwrap();
    let c53 = c_torsionfree(&q(5, 1), &q(3, 1)).unwrap();
    assert_eq!(c25, frac(9343, 9520), "criterion 2: FAIL - c(2,5) = {c25}");
    assert_eq!(c53, frac(28001, 27370), "criterion 2: FAIL - c(5,3) = {c53}");
    println!("criterion 2: PASS - c(2,5) = 9343/9520, c(5,3) = 28001/27370");
}

// ---------------------------------------------------------------- 3

/// Exact membership counts over [7, 500000] and their 4-decimal ratios
/// against S.
#[test]
fn criterion_3_empirical_counts() {
    let round4 = |x: f64| (x * 10_000.0).round() as i64;

    let r25 = count_range(&q(2, 1), &q(5, 1), 7, 500_000).unwrap();
    assert_eq!(r25.primes_considered, 41_535, "criterion 3: FAIL - (2,5) considered");
    assert_eq!(r25.skipped, 0);
    assert_eq!(r25.members, 23_498, "criterion 3: FAIL - (2,5) members {}", r25.members);
    assert_eq!(round4(r25.ratio_over_s), 9_823, "criterion 3: FAIL - (2,5) ratio/S {}", r25.ratio_over_s);

    let r53 = count_range(&q(5, 1), &q(3, 1), 7, 500_000).unwrap();
    assert_eq!(r53.primes_considered, 41_535);
    assert_eq!(r53.skipped, 0);
    assert_eq!(r53.members, 24_429, "criterion 3: FAIL - (5,3) members {}", r53.members);
    assert_eq!(round4(r53.ratio_over_s), 10_212, "criterion 3: FAIL - (5,3) ratio/S {}", r53.ratio_over_s);

    println!(
        "criterion 3: PASS - 23498 and 24429 members of 41535 primes; ratio/S 0.9823 and 1.0212"
    );
}

// ---------------------------------------------------------------- 4

/// Truncated double sums agree with every closed form inside a tail
/// bound that is itself below 1e-3; density truncations land within
/// 1e-4 of the exact values.
#[test]
fn criterion_4_closed_form_vs_oracle() {
    let w = TruncationWindow::default();
    let mut worst_tail = 0f64;
    let mut worst_diff = 0f64;
    for m in 1..=6u64 {
        for n in 1..=6u64 {
            let t = smn_truncated(m, n, w).unwrap();
            let closed = smn_closed(m, n).unwrap().approx();
            let diff = (t.value - closed).abs();
            assert!(
                diff <= t.tail_bound,
                "criterion 4: FAIL - S_({m},{n}) diff {diff} above tail {}",
                t.tail_bound
            );
            assert!(
                t.tail_bound <= 1e-3,
                "criterion 4: FAIL - S_({m},{n}) tail {} above 1e-3",
                t.tail_bound
            );
            worst_tail = worst_tail.max(t.tail_bound);
            worst_diff = worst_diff.max(diff);
        }
    }

    for (a, b) in [(q(2, 1), q(5, 1)), (q(5, 1), q(3, 1)), (q(5, 1), q(2, 1)), (q(2, 3), q(1, 2))]
    {
        let t = delta_truncated(&a, &b, w).unwrap();
        let exact = delta_exact(&a, &b).unwrap().approx();
        let diff = (t.value - exact).abs();
        assert!(
            diff <= 1e-4,
            "criterion 4: FAIL - delta({a},{b}) diff {diff} above 1e-4"
        );
    }
    println!(
        "criterion 4: PASS - 36 lattice sums within tails (worst diff {worst_diff:.1e}, worst tail {worst_tail:.1e}); 4 densities within 1e-4"
    );
}

// ---------------------------------------------------------------- 5

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

/// num/den mod p, or None when p divides either side.
fn reduce(r: &NonzeroRational, p: u64) -> Option<u64> {
    let n = r.numerator().rem_euclid(p as i64) as u64;
    let d = (r.denominator() as u64) % p;
    if n == 0 || d == 0 {
        return None;
    }
    Some(mulmod(n, powmod(d, p - 2, p), p))
}

/// Walks the full cycle of a mod p checking for b.
fn member_by_enumeration(a: u64, b: u64, p: u64) -> bool {
    if b == 1 {
        return true;
    }
    let mut x = a;
    while x != 1 {
        if x == b {
            return true;
        }
        x = mulmod(x, a, p);
    }
    false
}

fn naive_order(a: u64, p: u64) -> u64 {
    let mut x = a % p;
    let mut k = 1;
    while x != 1 {
        x = mulmod(x, a, p);
        k += 1;
    }
    k
}

fn sieve(hi: u64) -> Vec<u64> {
    let mut is_p = vec![true; (hi + 1) as usize];
    is_p[0] = false;
    if hi >= 1 {
        is_p[1] = false;
    }
    let mut i = 2;
    while i * i <= hi {
        if is_p[i as usize] {
            let mut j = i * i;
            while j <= hi {
                is_p[j as usize] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=hi).filter(|&n| is_p[n as usize]).collect()
}

/// Exponent-box torsion oracle over the {2,3,5}-generated family: with
/// exponent rows u, v, the torsion order is the number of solutions of
/// i*u + j*v = 0 (mod g) for (i, j) in [0, g)^2, where g is the gcd of
/// the 2x2 minors; dependence is g = 0.
fn box_torsion(u: [i64; 3], v: [i64; 3]) -> Option<u64> {
    let minors = [
        u[0] * v[1] - u[1] * v[0],
        u[0] * v[2] - u[2] * v[0],
        u[1] * v[2] - u[2] * v[1],
    ];
    let g = minors.iter().fold(0i64, |acc, m| acc.gcd(m));
    if g == 0 {
        return None;
    }
    let mut count = 0u64;
    for i in 0..g {
        for j in 0..g {
            if (0..3).all(|k| (i * u[k] + j * v[k]).rem_euclid(g) == 0) {
                count += 1;
            }
        }
    }
    Some(count)
}

fn from_exponents(e: [i64; 3]) -> NonzeroRational {
    let mut num = 1i64;
    let mut den = 1i64;
    for (p, &x) in [2i64, 3, 5].iter().zip(&e) {
        match x.cmp(&0) {
            std::cmp::Ordering::Greater => num *= p.pow(x as u32),
            std::cmp::Ordering::Less => den *= p.pow((-x) as u32),
            std::cmp::Ordering::Equal => {}
        }
    }
    q(num, den)
}

/// Three brute-force routes: torsion vs the exponent-box oracle,
/// membership vs direct subgroup walking, order vs naive iteration.
#[test]
fn criterion_5_brute_force_equivalence() {
    // (a) torsion over all exponent pairs in [-3, 3]^3.
    let range: Vec<i64> = (-3..=3).collect();
    let mut vectors = Vec::new();
    for &x in &range {
        for &y in &range {
            for &z in &range {
                vectors.push([x, y, z]);
            }
        }
    }
    let mismatches: u64 = vectors
        .par_iter()
        .map(|&u| {
            let a = from_exponents(u);
            let mut bad = 0u64;
            for &v in &vectors {
                let b = from_exponents(v);
                let expected = box_torsion(u, v);
                let got = torsion_order(&a, &b);
                let agree = match (&expected, &got) {
                    (None, Err(Error::DependentPair)) => true,
                    (Some(t), Ok(s)) => t == s,
                    _ => false,
                };
                if !agree {
                    eprintln!("torsion mismatch at {u:?}, {v:?}: box {expected:?}, lib {got:?}");
                    bad += 1;
                }
                // Torsion is blind to signs; spot-check one negation.
                if (u[0] + v[2]).rem_euclid(5) == 0 {
                    let neg = NonzeroRational::new(-a.numerator(), a.denominator()).unwrap();
                    let flipped = torsion_order(&neg, &b);
                    let same = matches!(
                        (&got, &flipped),
                        (Ok(x), Ok(y)) if x == y
                    ) || matches!(
                        (&got, &flipped),
                        (Err(Error::DependentPair), Err(Error::DependentPair))
                    );
                    if !same {
                        eprintln!("sign sensitivity at {u:?}, {v:?}");
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum();
    assert_eq!(mismatches, 0, "criterion 5: FAIL - {mismatches} torsion mismatches");

    // (b) membership against direct subgroup enumeration, p <= 10^4.
    let primes = sieve(10_000);
    let pairs = [
        (q(2, 1), q(5, 1)),
        (q(5, 1), q(3, 1)),
        (q(10, 1), q(3, 1)),
        (q(2, 3), q(1, 2)),
    ];
    let mut checked = 0u64;
    for (a, b) in &pairs {
        let wrong: Vec<u64> = primes
            .par_iter()
            .filter(|&&p| {
                let (am, bm) = match (reduce(a, p), reduce(b, p)) {
                    (Some(am), Some(bm)) => (am, bm),
                    _ => return false, // bad reduction is skipped on both routes
                };
                member_by_enumeration(am, bm, p) != is_member(a, b, p).unwrap()
            })
            .map(|&p| p)
            .collect();
        assert!(
            wrong.is_empty(),
            "criterion 5: FAIL - membership disagrees for ({a},{b}) at {wrong:?}"
        );
        checked += primes.len() as u64;
    }

    // (c) order against naive iteration, p <= 2000.
    let small: Vec<u64> = primes.iter().copied().take_while(|&p| p <= 2000).collect();
    for base in [q(2, 1), q(3, 1), q(10, 1), q(-2, 1), q(7, 5)] {
        for &p in &small {
            let Some(am) = reduce(&base, p) else { continue };
            assert_eq!(
                order_mod_p(&base, p).unwrap(),
                naive_order(am, p),
                "criterion 5: FAIL - order of {base} mod {p}"
            );
        }
    }
    println!(
        "criterion 5: PASS - {} torsion pairs, {checked} membership primes, {} order primes",
        vectors.len() * vectors.len(),
        small.len() * 5
    );
}

// ---------------------------------------------------------------- 6

/// Bracket claim exactly as stated: every independent torsion-free pair
/// with |numerator|, |denominator| <= 50 has c between 9343/9520 and
/// 28001/27370. The sweep also reports the positive subfamily, where
/// the claim does hold with the stated endpoints attained.
#[test]
fn criterion_6_extremal_bracket_property() {
    let lo = frac(9343, 9520);
    let hi = frac(28001, 27370);

    let mut family = Vec::new();
    for den in 1..=50i64 {
        for num in 1..=50i64 {
            if num.gcd(&den) == 1 {
                family.push(q(num, den));
                family.push(q(-num, den));
            }
        }
    }

    #[derive(Clone)]
    struct Sweep {
        tested: u64,
        violations: u64,
        positive_tested: u64,
        positive_violations: u64,
        min: Option<(ExactRational, NonzeroRational, NonzeroRational)>,
        max: Option<(ExactRational, NonzeroRational, NonzeroRational)>,
        sample: Option<(NonzeroRational, NonzeroRational, ExactRational)>,
    }
    let empty = Sweep {
        tested: 0,
        violations: 0,
        positive_tested: 0,
        positive_violations: 0,
        min: None,
        max: None,
        sample: None,
    };
    let merge = |mut x: Sweep, y: Sweep| {
        x.tested += y.tested;
        x.violations += y.violations;
        x.positive_tested += y.positive_tested;
        x.positive_violations += y.positive_violations;
        if y.min.as_ref().is_some_and(|m| x.min.as_ref().is_none_or(|c| m.0 < c.0)) {
            x.min = y.min;
        }
        if y.max.as_ref().is_some_and(|m| x.max.as_ref().is_none_or(|c| m.0 > c.0)) {
            x.max = y.max;
        }
        x.sample = x.sample.or(y.sample);
        x
    };

    let sweep = family
        .par_iter()
        .fold(
            || empty.clone(),
            |mut acc, a| {
                for b in &family {
                    if !matches!(torsion_order(a, b), Ok(1)) {
                        continue;
                    }
                    let c = c_torsionfree(a, b).unwrap();
                    acc.tested += 1;
                    let positive = a.numerator() > 0 && b.numerator() > 0;
                    if positive {
                        acc.positive_tested += 1;
                    }
                    let inside = lo <= c && c <= hi;
                    if !inside {
                        acc.violations += 1;
                        if positive {
                            acc.positive_violations += 1;
                        }
                        if acc.sample.is_none() {
                            acc.sample = Some((*a, *b, c.clone()));
                        }
                    }
                    if acc.min.as_ref().is_none_or(|m| c < m.0) {
                        acc.min = Some((c.clone(), *a, *b));
                    }
                    if acc.max.as_ref().is_none_or(|m| c > m.0) {
                        acc.max = Some((c, *a, *b));
                    }
                }
                acc
            },
        )
        .reduce(|| empty.clone(), merge);

    let (cmin, amin, bmin) = sweep.min.clone().unwrap();
    let (cmax, amax, bmax) = sweep.max.clone().unwrap();
    println!(
        "criterion 6: sweep tested {} pairs ({} positive); extremes {cmin} at ({amin},{bmin}) and {cmax} at ({amax},{bmax})",
        sweep.tested, sweep.positive_tested
    );
    println!(
        "criterion 6: positive subfamily has {} violations; signed family has {}",
        sweep.positive_violations, sweep.violations
    );

    // Freeze the sweep shape and the positive-subfamily result, which
    // holds with the endpoints attained exactly.
    assert_eq!(sweep.tested, 8_960_416);
    assert_eq!(sweep.positive_tested, 2_240_104);
    assert_eq!(sweep.positive_violations, 0);
    assert_eq!(sweep.min.unwrap().0, frac(12947, 13685));
    assert_eq!(sweep.max.unwrap().0, frac(14424, 13685));

    if let Some((a, b, c)) = &sweep.sample {
        println!("criterion 6: FAIL - e.g. c({a},{b}) = {c} outside [9343/9520, 28001/27370]");
    }
    assert_eq!(
        sweep.violations, 0,
        "criterion 6: FAIL - {} pairs violate the bracket; first sample above",
        sweep.violations
    );
    println!("criterion 6: PASS");
}

// ---------------------------------------------------------------- 7

/// Recurrence pipeline on x_{k+2} = 5x_{k+1} - 6x_k, x0 = x1 = 1:
/// density (921/920)S via the CLI, divisor primes (N = 500, bound 10^4)
/// against member primes of the reduced pair, inseparable density one.
#[test]
fn criterion_7_recurrence_pipeline() {
    // CLI reports the exact multiple of S.
    let out = binary(&[
        "--format", "json", "recur", "--r", "5", "--s", "6", "--x0", "1", "--x1", "1",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        doc["result"]["density"]["coefficient"], "921/920",
        "criterion 7: FAIL - CLI density {:?}",
        doc["result"]["density"]
    );

    // Inseparable case: density one.
    let insep = RecurrenceSpec::new(
        "2".parse().unwrap(),
        "1".parse().unwrap(),
        "1".parse().unwrap(),
        "2".parse().unwrap(),
    )
    .unwrap();
    assert!(
        matches!(classify(&insep).unwrap().density, DensityOutcome::One),
        "criterion 7: FAIL - inseparable density"
    );

    // Divisor primes as stated: N = 500 terms, primes below 10^4.
    let spec = RecurrenceSpec::new(
        "5".parse().unwrap(),
        "6".parse().unwrap(),
        "1".parse().unwrap(),
        "1".parse().unwrap(),
    )
    .unwrap();
    let divisors = prime_divisors_of_sequence(&spec, 500, 10_000).unwrap();

    // Member primes of the reduced pair (3/2, 2) over the same bound,
    // skipping the bad-reduction primes 2 and 3.
    let (a, b) = (q(3, 2), q(2, 1));
    let members: Vec<u64> = sieve(10_000)
        .into_iter()
        .filter(|&p| p != 2 && p != 3 && is_member(&a, &b, p).unwrap())
        .collect();

    let missing: Vec<u64> = members.iter().copied().filter(|p| !divisors.contains(p)).collect();
    let extra: Vec<u64> = divisors.iter().copied().filter(|p| !members.contains(p)).collect();
    println!(
        "criterion 7: N=500 finds {} divisor primes vs {} member primes; {} missing (first: {:?}), {} extra",
        divisors.len(),
        members.len(),
        missing.len(),
        &missing[..missing.len().min(6)],
        extra.len()
    );

    // A deeper scan closes the gap: entry indices reach p - 1, so the
    // term horizon must cover the prime bound.
    let deep = prime_divisors_of_sequence(&spec, 10_000, 10_000).unwrap();
    println!(
        "criterion 7: N=10000 finds {} divisor primes; equals member set: {}",
        deep.len(),
        deep == members
    );

    assert!(extra.is_empty(), "criterion 7: FAIL - non-member divisors {extra:?}");
    assert_eq!(
        divisors, members,
        "criterion 7: FAIL - the 500-term scan misses {} member primes (see above)",
        missing.len()
    );
    println!("criterion 7: PASS");
}

// ---------------------------------------------------------------- 8

/// Perrin-type divisibility p | a_p for primes p <= 1000, pinning the
/// coefficient recursion behind the zeta-series constant.
#[test]
fn criterion_8_perrin_property() {
    // Fixed points from OEIS A001608 (shifted so a_1 = 0, a_2 = 2).
    assert_eq!(ak(1).unwrap(), 0u32.into());
    assert_eq!(ak(2).unwrap(), 2u32.into());
    assert_eq!(ak(3).unwrap(), 3u32.into());
    assert_eq!(ak(10).unwrap(), 17u32.into());

    let mut checked = 0u32;
    for p in sieve(1000) {
        let a_p = ak(p).unwrap();
        assert_eq!(a_p % p, 0u32.into(), "criterion 8: FAIL - a_{p} not divisible by {p}");
        checked += 1;
    }
    assert_eq!(checked, 168);
    println!("criterion 8: PASS - p | a_p for all {checked} primes up to 1000");
}
