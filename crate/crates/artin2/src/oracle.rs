// SPDX-License-Identifier: Apache-2.0

//! Truncated index-lattice sums with rigorous tail bounds.
//!
//! The density attached to a torsionfree independent pair expands over
//! index levels (i, j) as
//!
//! ```text
//! delta = sum_{i >= 1} sum_{j >= 1} mu(j) f_{i,j} / (i^2 j phi(ij)),
//! ```
//!
//! inclusion-exclusion over the splitting conditions behind
//! [`crate::density::field_degree`]. This module evaluates rectangular
//! truncations of that sum, and of the conditioned lattice sums S_{m,n},
//! together with a proven bound on everything discarded, so truncations
//! can be checked against the closed forms without circularity.
//!
//! The tail bound chains three elementary facts:
//!
//! * phi(ij) >= phi(i) phi(j), which splits the double tail into
//!   `K * tail_i(I) + head_i(I) * tail_j(J)` where K is the full
//!   squarefree sum `sum 1/(j phi(j)) = zeta(2) zeta(3) / zeta(6)`;
//! * phi(n) >= sqrt(n) for n > 6, so
//!   `tail_i(I) = sum_{i > I} 1/(i^2 phi(i)) <= (2/3) I^(-3/2)` once
//!   I >= 6;
//! * partial sums of 1/(j phi(j)) and 1/(i^2 phi(i)) evaluated in 64.64
//!   fixed point with directed rounding (floor when a lower bound is
//!   needed, ceiling when an upper one is), so the published tail is a
//!   bound, not an estimate.
//!
//! The degree-loss factor is at most 4 (at most 2 on odd i), which scales
//! the envelope for the full density sum.
//!
//! Floating-point accumulation uses Neumaier compensation in a fixed
//! order (ascending i, then ascending j inside each strip). Parallel runs
//! compute disjoint i-strips and fold them in index order, so results are
//! bit-identical across thread counts.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::constants;
use crate::density::{single_torsionfree_check, DiscParts, DiscSet};
use crate::error::{Error, Result};
use crate::rational::{factor_rational, NonzeroRational};

/// Hard cap on truncation levels; keeps the mu/phi sieves at a few MiB
/// and every denominator comfortably inside u128.
pub const LEVEL_CAP: u32 = 1 << 20;

/// Rectangular truncation bounds: Kummer levels i <= i_max, cyclotomic
/// squarefree levels j <= j_max.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationWindow {
    pub i_max: u32,
    pub j_max: u32,
}

impl Default for TruncationWindow {
    /// Window sized so the proven tail sits below 1e-3 while the scan
    /// still runs in well under a second.
    fn default() -> Self {
        TruncationWindow {
            i_max: 300,
            j_max: 3000,
        }
    }
}

impl TruncationWindow {
    pub fn new(i_max: u32, j_max: u32) -> Result<Self> {
        let w = TruncationWindow { i_max, j_max };
        w.validate()?;
        Ok(w)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.i_max == 0 || self.j_max == 0 {
            return Err(Error::InvalidInput("truncation levels must be >= 1".into()));
        }
        if self.i_max > LEVEL_CAP || self.j_max > LEVEL_CAP {
            return Err(Error::ValueOutOfRange(format!(
                "truncation levels above {LEVEL_CAP} are not supported"
            )));
        }
        Ok(())
    }
}

/// A truncated sum plus an upper bound on the modulus of everything the
/// truncation discarded (including float rounding slack).
#[derive(Clone, Copy, Debug)]
pub struct OracleResult {
    pub value: f64,
    pub tail_bound: f64,
}

/// Neumaier-compensated accumulator; improves on Kahan when the running
/// sum is smaller than the incoming term.
#[derive(Clone, Copy, Default)]
struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn total(&self) -> f64 {
        self.s + self.c
    }
}

/// Moebius and totient tables for 0..=n by a shared sieve.
fn mu_phi_upto(n: u32) -> (Vec<i8>, Vec<u32>) {
    let n = n as usize;
    let mut mu = vec![1i8; n + 1];
    let mut phi: Vec<u32> = (0..=n as u32).collect();
    let mut composite = vec![false; n + 1];
    mu[0] = 0;
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        for m in (p..=n).step_by(p) {
            if m > p {
                composite[m] = true;
            }
            phi[m] = phi[m] / p as u32 * (p as u32 - 1);
            mu[m] = -mu[m];
        }
        if let Some(p2) = p.checked_mul(p) {
            if p2 <= n {
                for m in (p2..=n).step_by(p2) {
                    mu[m] = 0;
                }
            }
        }
    }
    (mu, phi)
}

const FIX_BITS: u32 = 64;
const FIX_ONE: u128 = 1 << FIX_BITS;

/// Relative inflation applied wherever an f64 conversion could round an
/// exact directed bound the wrong way; orders of magnitude above the
/// 2^-52 that nearest rounding can actually lose.
const DIRECTED_SLACK: f64 = 1e-12;

fn fix_to_f64_lower(acc: u128) -> f64 {
    (acc as f64) * 2f64.powi(-(FIX_BITS as i32)) * (1.0 - DIRECTED_SLACK)
}

fn fix_to_f64_upper(acc: u128) -> f64 {
    (acc as f64) * 2f64.powi(-(FIX_BITS as i32)) * (1.0 + DIRECTED_SLACK)
}

/// Lower bound on sum_{j <= j_max, j squarefree} 1/(j phi(j)).
fn partial_sqfree_lower(j_max: u32, mu: &[i8], phi: &[u32]) -> f64 {
    let mut acc: u128 = 0;
    for j in 1..=j_max as usize {
        if mu[j] != 0 {
            acc += FIX_ONE / ((j as u128) * (phi[j] as u128));
        }
    }
    fix_to_f64_lower(acc)
}

/// Upper bound on sum_{i <= i_max} 1/(i^2 phi(i)).
fn head_i_upper(i_max: u32, phi: &[u32]) -> f64 {
    let mut acc: u128 = 0;
    for i in 1..=i_max as usize {
        let den = (i as u128) * (i as u128) * (phi[i] as u128);
        acc += FIX_ONE.div_ceil(den);
    }
    fix_to_f64_upper(acc)
}

/// Upper bound on sum_{i > i_max} 1/(i^2 phi(i)). Uses phi(i) >= sqrt(i)
/// for i > 6 and an integral comparison; exact small terms patch the
/// range where that envelope does not apply.
fn tail_i_upper(i_max: u32) -> f64 {
    const SMALL_PHI: [f64; 7] = [0.0, 1.0, 1.0, 2.0, 2.0, 4.0, 2.0];
    let mut extra = 0.0;
    for i in (i_max + 1)..=6 {
        let x = i as f64;
        extra += (1.0 + DIRECTED_SLACK) / (x * x * SMALL_PHI[i as usize]);
    }
    let base = i_max.max(6) as f64;
    extra + (2.0 / 3.0) * base.powf(-1.5) * (1.0 + DIRECTED_SLACK)
}

/// Upper bound on K = sum over squarefree j of 1/(j phi(j)), which equals
/// zeta(2) zeta(3) / zeta(6) by multiplicativity (about 1.9435964).
fn k_upper() -> f64 {
    static K: OnceLock<f64> = OnceLock::new();
    *K.get_or_init(|| {
        let z2 = constants::zeta(2, 1e-20).expect("zeta(2) at fixed precision");
        let z3 = constants::zeta(3, 1e-20).expect("zeta(3) at fixed precision");
        let z6 = constants::zeta(6, 1e-20).expect("zeta(6) at fixed precision");
        let up = (z2.approx() + z2.error_bound) * (z3.approx() + z3.error_bound)
            / (z6.approx() - z6.error_bound);
        up * (1.0 + DIRECTED_SLACK)
    })
}

/// Upper bound on sum_{j > j_max, j squarefree} 1/(j phi(j)).
fn tail_sqfree_upper(j_max: u32, mu: &[i8], phi: &[u32]) -> f64 {
    (k_upper() - partial_sqfree_lower(j_max, mu, phi)).max(0.0)
}

/// Upper bound on the unsigned mass outside the window for the plain
/// lattice weight 1/(i^2 j phi(ij)); phi(ij) >= phi(i) phi(j) splits the
/// two tails.
fn lattice_tail_upper(window: TruncationWindow, mu: &[i8], phi: &[u32]) -> f64 {
    let t = k_upper() * tail_i_upper(window.i_max)
        + head_i_upper(window.i_max, phi) * tail_sqfree_upper(window.j_max, mu, phi);
    t * (1.0 + 1e-9)
}

/// Allowance for nearest-rounding noise in the accumulated value itself;
/// compensated summation over < 2^32 terms of total mass < 8 stays far
/// below this.
const ROUNDING_SLACK: f64 = 1e-12;

/// One i-strip of the density lattice, summed over ascending squarefree j.
fn density_strip(set: &DiscSet, i: u64, j_max: u32, mu: &[i8], phi: &[u32]) -> f64 {
    let i_even = i % 2 == 0;
    let i2 = (i as u128) * (i as u128);
    let mut acc = Neumaier::default();
    for j in 1..=j_max as u64 {
        let m = mu[j as usize];
        if m == 0 {
            continue;
        }
        let f = set.f(i_even, i as u128 * j as u128) as f64;
        let den = i2 * (j as u128) * phi_table_product(i, j, phi);
        let term = f / den as f64;
        acc.add(if m > 0 { term } else { -term });
    }
    acc.total()
}

/// phi(ij) from sieved values: phi(i) phi(j) g / phi(g), g = gcd(i, j).
fn phi_table_product(i: u64, j: u64, phi: &[u32]) -> u128 {
    let g = crate::primes::gcd_u64(i, j);
    (phi[i as usize] as u128) * (phi[j as usize] as u128) * (g as u128)
        / (phi[g as usize] as u128)
}

/// Truncation of the full density sum for a torsionfree independent pair,
/// with a tail bound covering every discarded (i, j).
pub fn delta_truncated(
    a: &NonzeroRational,
    b: &NonzeroRational,
    window: TruncationWindow,
) -> Result<OracleResult> {
    window.validate()?;
    let set = DiscSet::new(a, b)?;
    let (mu, phi) = mu_phi_upto(window.i_max.max(window.j_max));
    let strips: Vec<f64> = (1..=window.i_max as u64)
        .into_par_iter()
        .map(|i| density_strip(&set, i, window.j_max, &mu, &phi))
        .collect();
    let mut acc = Neumaier::default();
    for s in strips {
        acc.add(s);
    }
    let value = acc.total();
    // Degree loss never exceeds 4, so the plain-lattice envelope times 4
    // dominates the discarded mass.
    let tail_bound = 4.0 * lattice_tail_upper(window, &mu, &phi) + ROUNDING_SLACK;
    debug_assert!(
        (-tail_bound..1.0 + tail_bound).contains(&value),
        "a density truncation left [0, 1] by more than its own tail"
    );
    Ok(OracleResult { value, tail_bound })
}

/// Truncation of the single strip i of the density sum, over j <= j_max.
pub fn delta_i_truncated(
    a: &NonzeroRational,
    b: &NonzeroRational,
    i: u32,
    j_max: u32,
) -> Result<OracleResult> {
    if i == 0 {
        return Err(Error::InvalidInput("strip index must be >= 1".into()));
    }
    let window = TruncationWindow::new(i, j_max)?;
    let set = DiscSet::new(a, b)?;
    let (mu, phi) = mu_phi_upto(window.i_max.max(window.j_max));
    let value = density_strip(&set, i as u64, j_max, &mu, &phi);
    let f_cap = if i % 2 == 0 { 4.0 } else { 2.0 };
    let i_f = i as f64;
    let tail_bound = f_cap * tail_sqfree_upper(j_max, &mu, &phi)
        / (i_f * i_f * phi[i as usize] as f64)
        * (1.0 + 1e-9)
        + ROUNDING_SLACK;
    Ok(OracleResult { value, tail_bound })
}

/// Truncation of the conditioned lattice sum S_{m,n}: terms mu(j) /
/// (i^2 j phi(ij)) restricted to m | i and mn | ij, over the same
/// rectangular window (absolute levels, not multiples of m).
pub fn smn_truncated(m: u64, n: u64, window: TruncationWindow) -> Result<OracleResult> {
    window.validate()?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("lattice indices must be >= 1".into()));
    }
    if m > LEVEL_CAP as u64 || n > LEVEL_CAP as u64 {
        return Err(Error::ValueOutOfRange(format!(
            "lattice indices above {LEVEL_CAP} are not supported"
        )));
    }
    let (mu, phi) = mu_phi_upto(window.i_max.max(window.j_max));
    let mn = (m as u128) * (n as u128);
    let rows: Vec<u64> = (1..=window.i_max as u64).filter(|i| i % m == 0).collect();
    let strips: Vec<f64> = rows
        .into_par_iter()
        .map(|i| {
            let i2 = (i as u128) * (i as u128);
            let mut acc = Neumaier::default();
            for j in 1..=window.j_max as u64 {
                let mv = mu[j as usize];
                if mv == 0 || (i as u128 * j as u128) % mn != 0 {
                    continue;
                }
                let den = i2 * (j as u128) * phi_table_product(i, j, &phi);
                let term = 1.0 / den as f64;
                acc.add(if mv > 0 { term } else { -term });
            }
            acc.total()
        })
        .collect();
    let mut acc = Neumaier::default();
    for s in strips {
        acc.add(s);
    }
    // The indicator below only removes terms, so the unrestricted
    // envelope still bounds the discarded mass.
    let tail_bound = lattice_tail_upper(window, &mu, &phi) + ROUNDING_SLACK;
    Ok(OracleResult {
        value: acc.total(),
        tail_bound,
    })
}

/// Truncation of the classical single-generator density sum
/// sum_j mu(j) / [Q(zeta_j, a^(1/j)) : Q] over squarefree j <= j_max.
///
/// Panics if a truncated partial sum ever leaves [0, 1] by more than
/// float noise; the partial sums are nested inclusion-exclusion counts,
/// so an excursion means the degree table is wrong.
pub fn artin_truncated(a: &NonzeroRational, j_max: u32) -> Result<OracleResult> {
    let window = TruncationWindow::new(1, j_max)?;
    let fa = factor_rational(a)?;
    single_torsionfree_check(&fa)?;
    let d = DiscParts::of(&fa).magnitude();
    let la = if d % 2 == 0 { d } else { 2 * d };
    let (mu, phi) = mu_phi_upto(window.j_max);
    let mut acc = Neumaier::default();
    for j in 1..=j_max as u64 {
        let m = mu[j as usize];
        if m == 0 {
            continue;
        }
        // Degree j phi(j), halved exactly when the entanglement divisor
        // lcm(2, |D(a)|) divides j.
        let f = if (j as u128) % la == 0 { 2.0 } else { 1.0 };
        let term = f / ((j as u128 * phi[j as usize] as u128) as f64);
        acc.add(if m > 0 { term } else { -term });
        let partial = acc.total();
        assert!(
            (-1e-9..=1.0 + 1e-9).contains(&partial),
            "partial density sum escaped [0, 1] at level {j}: {partial}"
        );
    }
    let tail_bound =
        2.0 * tail_sqfree_upper(j_max, &mu, &phi) * (1.0 + 1e-9) + ROUNDING_SLACK;
    Ok(OracleResult {
        value: acc.total(),
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{delta_exact, smn_closed};

    fn q(n: i64, d: i64) -> NonzeroRational {
        NonzeroRational::new(n, d).unwrap()
    }

    #[test]
    fn default_window_tail_is_under_a_thousandth() {
        // The f-free lattice tail is what carries the 1e-3 contract; the
        // delta tail is four times it since |f| <= 4 termwise.
        let r = smn_truncated(1, 1, TruncationWindow::default()).unwrap();
        assert!(r.tail_bound > 0.0);
        assert!(r.tail_bound <= 1e-3, "tail {} too large", r.tail_bound);
        let d = delta_truncated(&q(2, 1), &q(5, 1), TruncationWindow::default()).unwrap();
        assert!(d.tail_bound <= 4.0 * r.tail_bound * (1.0 + 1e-9));
    }

    #[test]
    fn plain_lattice_truncation_matches_the_product_constant() {
        let r = smn_truncated(1, 1, TruncationWindow::default()).unwrap();
        let s = constants::s_f64();
        let diff = (r.value - s).abs();
        assert!(diff <= r.tail_bound, "diff {diff} above tail {}", r.tail_bound);
        // The truncation really does discard mass; if this ever becomes
        // exact the tail accounting is suspect.
        assert!(diff >= 1e-8);
    }

    #[test]
    fn conditioned_truncations_match_closed_forms() {
        let w = TruncationWindow::default();
        for (m, n) in [(1u64, 2u64), (2, 1), (2, 5), (1, 6), (3, 4)] {
            let r = smn_truncated(m, n, w).unwrap();
            let exact = smn_closed(m, n).unwrap().approx();
            let diff = (r.value - exact).abs();
            assert!(
                diff <= r.tail_bound,
                "S_({m},{n}): diff {diff} above tail {}",
                r.tail_bound
            );
        }
    }

    #[test]
    fn density_truncations_match_closed_forms() {
        let w = TruncationWindow::default();
        for (a, b) in [(q(2, 1), q(5, 1)), (q(5, 1), q(3, 1)), (q(3, 2), q(2, 1))] {
            let r = delta_truncated(&a, &b, w).unwrap();
            let exact = delta_exact(&a, &b).unwrap().approx();
            let diff = (r.value - exact).abs();
            assert!(
                diff <= r.tail_bound,
                "({a}, {b}): diff {diff} above tail {}",
                r.tail_bound
            );
            // Observed truncation error is around 1e-5; leave headroom
            // but catch gross regressions.
            assert!(diff <= 1e-4, "({a}, {b}): diff {diff} implausibly large");
        }
    }

    #[test]
    fn strips_partition_the_window() {
        let w = TruncationWindow { i_max: 40, j_max: 400 };
        let whole = delta_truncated(&q(2, 1), &q(5, 1), w).unwrap().value;
        let mut sum = 0.0;
        for i in 1..=w.i_max {
            sum += delta_i_truncated(&q(2, 1), &q(5, 1), i, w.j_max)
                .unwrap()
                .value;
        }
        assert!((whole - sum).abs() <= 1e-10);
    }

    #[test]
    fn first_strip_agrees_with_single_generator_sum() {
        // Strip i = 1 of the pair sum only sees the odd-level divisor
        // lcm(2, |D(a)|), which is exactly the single-generator rule.
        let strip = delta_i_truncated(&q(2, 1), &q(5, 1), 1, 3000).unwrap().value;
        let single = artin_truncated(&q(2, 1), 3000).unwrap().value;
        assert!((strip - single).abs() <= 1e-12);
    }

    #[test]
    fn single_generator_sum_approaches_known_value() {
        // Stephens-normalized constant for a = 2: 0.3739558136...
        let r = artin_truncated(&q(2, 1), 3000).unwrap();
        assert!((r.value - 0.373_955_813_619_202_288).abs() <= r.tail_bound);
    }

    #[test]
    fn growing_the_window_moves_less_than_the_tail() {
        let small = TruncationWindow { i_max: 150, j_max: 1500 };
        let big = TruncationWindow { i_max: 300, j_max: 3000 };
        let a = q(2, 1);
        let b = q(5, 1);
        let rs = delta_truncated(&a, &b, small).unwrap();
        let rb = delta_truncated(&a, &b, big).unwrap();
        assert!((rs.value - rb.value).abs() <= rs.tail_bound);
        assert!(rb.tail_bound < rs.tail_bound);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(TruncationWindow::new(0, 10).is_err());
        assert!(TruncationWindow::new(10, 0).is_err());
        assert!(TruncationWindow::new(LEVEL_CAP + 1, 10).is_err());
        assert!(smn_truncated(0, 1, TruncationWindow::default()).is_err());
        assert!(matches!(
            delta_truncated(&q(2, 1), &q(4, 1), TruncationWindow::default()),
            Err(Error::DependentPair)
        ));
        assert!(matches!(
            delta_truncated(&q(8, 1), &q(5, 1), TruncationWindow::default()),
            Err(Error::NotTorsionfree(3))
        ));
        assert!(matches!(
            artin_truncated(&q(4, 1), 100),
            Err(Error::SquareInput)
        ));
    }

    #[test]
    fn tail_shrinks_with_the_window() {
        let (mu, phi) = mu_phi_upto(6000);
        let t1 = lattice_tail_upper(TruncationWindow { i_max: 300, j_max: 3000 }, &mu, &phi);
        let t2 = lattice_tail_upper(TruncationWindow { i_max: 600, j_max: 6000 }, &mu, &phi);
        assert!(t2 < t1);
        // Bound components stay positive and meaningful.
        assert!(t1 < 1e-3 && t1 > 1e-5);
    }

    #[test]
    fn sieve_tables_are_correct() {
        let (mu, phi) = mu_phi_upto(60);
        let mu_ref: [i8; 13] = [0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        let phi_ref: [u32; 13] = [0, 1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4];
        for i in 1..=12 {
            assert_eq!(mu[i] as i32, mu_ref[i] as i32, "mu({i})");
            assert_eq!(phi[i], phi_ref[i], "phi({i})");
        }
        assert_eq!(mu[36], 0);
        assert_eq!(phi[60], 16);
    }
}
