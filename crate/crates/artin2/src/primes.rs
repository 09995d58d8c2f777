// SPDX-License-Identifier: Apache-2.0

//! Prime generation, primality testing and 64-bit factorization.
//!
//! Three layers, all deterministic:
//!
//! * a plain sieve of Eratosthenes plus a segmented variant for prime
//!   enumeration in `[lo, hi]` without materializing a table up to `hi`;
//! * Miller-Rabin with the fixed base set {2, 3, 5, 7, 11, 13, 17, 19, 23,
//!   29, 31, 37}, which is a proven deterministic witness set for all
//!   n < 3.3 * 10^24 (Sorenson-Webster), so no probabilistic answers for
//!   u64 inputs;
//! * Brent's variant of Pollard rho for the occasional cofactor that
//!   survives trial division by all primes below 2^16.
//!
//! [`PrimeTools`] bundles a smallest-prime-factor table with a base prime
//! list so that the empirical counting paths can factor p - 1 for every
//! prime p below a configured ceiling without per-call sieving.

use crate::error::{Error, Result};

/// Upper bound for trial division inside [`factor_u64`]. After dividing out
/// every prime below 2^16 a surviving u64 cofactor has at most three prime
/// factors, each above 2^16.
const TRIAL_BOUND: u64 = 1 << 16;

/// (x * y) mod m without overflow; operands must already be below m.
#[inline]
pub(crate) fn mulmod(x: u64, y: u64, m: u64) -> u64 {
    ((x as u128 * y as u128) % m as u128) as u64
}

/// (base ^ exp) mod m by square and multiply; m >= 2.
pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    debug_assert!(m >= 2);
    base %= m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // n - 1 = d * 2^s with d odd.
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes <= limit, ascending.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Primes in [lo, hi], ascending, via a segmented sieve over base primes
/// up to sqrt(hi). Memory is O(sqrt(hi) + segment).
pub fn segmented_primes(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 2;
    let base = simple_sieve(root);
    let mut out = Vec::new();
    const SEG: u64 = 1 << 20;
    let mut start = lo;
    let mut mark = vec![false; SEG as usize];
    while start <= hi {
        let end = hi.min(start + SEG - 1);
        let len = (end - start + 1) as usize;
        mark[..len].fill(false);
        for &p in &base {
            if p * p > end {
                break;
            }
            // First multiple of p in [start, end] that is >= p^2.
            let mut m = (start.div_ceil(p)) * p;
            if m < p * p {
                m = p * p;
            }
            while m <= end {
                mark[(m - start) as usize] = true;
                m += p;
            }
        }
        for i in 0..len {
            if !mark[i] {
                let v = start + i as u64;
                if v >= 2 {
                    out.push(v);
                }
            }
        }
        start = end + 1;
        if start == 0 {
            break; // u64 wrap guard; unreachable for supported ceilings
        }
    }
    out
}

/// Brent-cycle Pollard rho. Returns a nontrivial factor of odd composite n.
fn pollard_brent(n: u64) -> Result<u64> {
    debug_assert!(n > 3 && n % 2 == 1 && !is_prime_u64(n));
    // Deterministic schedule: polynomial x^2 + c for c = 1, 2, 3, ...
    for c in 1..=64u64 {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut cycle = 1u64;
        let mut iterations = 0u64;
        'outer: loop {
            let y = x;
            for _ in 0..cycle {
                x = f(x);
            }
            let mut count = 0u64;
            while count < cycle {
                // Batch gcd: accumulate |x - y| products 128 steps at a time.
                let batch = 128.min(cycle - count);
                let mut q = 1u64;
                let save = x;
                for _ in 0..batch {
                    x = f(x);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                count += batch;
                iterations += batch;
                let g = gcd_u64(q, n);
                if g > 1 {
                    if g < n {
                        return Ok(g);
                    }
                    // Batch overshot a factor; redo this stretch stepwise.
                    let mut z = save;
                    for _ in 0..batch {
                        z = f(z);
                        let g = gcd_u64(z.abs_diff(y), n);
                        if g > 1 {
                            if g < n {
                                return Ok(g);
                            }
                            break 'outer; // cycle degenerated, next c
                        }
                    }
                    break 'outer;
                }
                if iterations > (1 << 22) {
                    break 'outer; // budget for this c exhausted
                }
            }
            cycle = cycle.saturating_mul(2);
        }
    }
    Err(Error::FactorizationFailure(n))
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Full factorization of n >= 1 as ascending (prime, exponent) pairs.
pub fn factor_u64(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut n = n;
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in 2..TRIAL_BOUND {
        if p * p > n {
            break;
        }
        // Skipping non-primes costs nothing measurable here: composite p
        // cannot divide the remaining n once its prime factors are gone.
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        // Remaining cofactor has all prime factors > 2^16, hence at most 3.
        let mut stack = vec![n];
        let mut large: Vec<u64> = Vec::new();
        while let Some(m) = stack.pop() {
            if is_prime_u64(m) {
                large.push(m);
            } else {
                let d = pollard_brent(m)?;
                stack.push(d);
                stack.push(m / d);
            }
        }
        large.sort_unstable();
        for p in large {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Default factoring ceiling for the empirical counting paths.
pub const DEFAULT_CEILING: u64 = 100_000_000;

/// Environment variable raising or lowering the empirical ceiling.
pub const CEILING_ENV: &str = "ARTIN2_SPF_CEILING";

/// Cap on the dense smallest-prime-factor table; beyond it factoring falls
/// back to trial division by the cached base primes. 2^22 u32 entries keep
/// the table at 16 MiB regardless of the configured ceiling.
const SPF_TABLE_CAP: u64 = 1 << 22;

/// Sieve-backed factoring service for ranges of primes.
///
/// Construction sieves once; afterwards [`PrimeTools::factor_pairs`] is
/// O(log n) for n below the table and O(pi(sqrt(ceiling))) above it.
pub struct PrimeTools {
    ceiling: u64,
    spf: Vec<u32>,
    base: Vec<u64>,
}

impl PrimeTools {
    pub fn new(ceiling: u64) -> Self {
        let ceiling = ceiling.max(100);
        let table_len = (ceiling + 1).min(SPF_TABLE_CAP) as usize;
        let mut spf = vec![0u32; table_len];
        for i in 2..table_len {
            if spf[i] == 0 {
                let mut j = i;
                while j < table_len {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let root = (ceiling as f64).sqrt() as u64 + 2;
        let base = simple_sieve(root);
        PrimeTools { ceiling, spf, base }
    }

    /// Ceiling from `ARTIN2_SPF_CEILING`, falling back to
    /// [`DEFAULT_CEILING`] when unset or unparseable.
    pub fn ceiling_from_env() -> u64 {
        std::env::var(CEILING_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .unwrap_or(DEFAULT_CEILING)
    }

    pub fn ceiling(&self) -> u64 {
        self.ceiling
    }

    fn check(&self, n: u64) -> Result<()> {
        if n > self.ceiling {
            return Err(Error::CeilingExceeded {
                requested: n,
                ceiling: self.ceiling,
            });
        }
        Ok(())
    }

    /// Prime factors of n >= 1 with multiplicity, ascending.
    /// spf_factorize(96) = [2, 2, 2, 2, 2, 3].
    pub fn spf_factorize(&self, n: u64) -> Result<Vec<u64>> {
        Ok(self
            .factor_pairs(n)?
            .into_iter()
            .flat_map(|(p, e)| std::iter::repeat(p).take(e as usize))
            .collect())
    }

    /// Ascending (prime, exponent) pairs of n; n must be within the ceiling.
    pub fn factor_pairs(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        self.check(n)?;
        if n == 0 {
            return Err(Error::InvalidInput("cannot factor 0".into()));
        }
        let mut out = Vec::new();
        let mut m = n;
        if (m as usize) < self.spf.len() {
            while m > 1 {
                let p = self.spf[m as usize] as u64;
                let mut e = 0u32;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                out.push((p, e));
            }
            return Ok(out);
        }
        for &p in &self.base {
            if p * p > m {
                break;
            }
            if m % p == 0 {
                let mut e = 0u32;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        if m > 1 {
            // base covers sqrt(ceiling) >= sqrt(n), so m is prime.
            out.push((m, 1));
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Primes in [lo, hi] ascending; hi must be within the ceiling.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        self.check(hi)?;
        Ok(segmented_primes(lo, hi))
    }
}
