// SPDX-License-Identifier: Apache-2.0

//! Arbitrary-precision fixed-point arithmetic with accounted rounding.
//!
//! [`Fx`] is a dyadic fixed-point number m / 2^scale with a BigInt
//! mantissa. Every operation either is exact (add, sub, integer multiply,
//! doubling) or rounds to nearest with ties away from zero, contributing
//! at most half an ulp (2^-scale) of absolute error. Transcendental
//! helpers return the number of ulps of error they may have introduced so
//! callers can keep an explicit error ledger instead of trusting a global
//! "guard digits" margin.
//!
//! All binary operations require equal scales; mixing scales is a bug, not
//! a coercion.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dyadic fixed-point value m / 2^scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Fx {
    pub m: BigInt,
    pub scale: u32,
}

/// round(v / 2^k), ties away from zero.
fn round_shift(v: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return v.clone();
    }
    let half = BigUint::one() << (k - 1);
    let mag = (v.magnitude() + half) >> k;
    BigInt::from_biguint(if v.sign() == Sign::Minus { Sign::Minus } else { Sign::Plus }, mag)
}

/// round(n / d) for d > 0, ties away from zero.
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    debug_assert!(d.is_positive());
    let dmag = d.magnitude();
    let mag = (n.magnitude() * 2u32 + dmag) / (dmag * 2u32);
    BigInt::from_biguint(if n.sign() == Sign::Minus { Sign::Minus } else { Sign::Plus }, mag)
}

impl Fx {
    pub fn zero(scale: u32) -> Fx {
        Fx {
            m: BigInt::zero(),
            scale,
        }
    }

    pub fn from_int(v: i64, scale: u32) -> Fx {
        Fx {
            m: BigInt::from(v) << scale,
            scale,
        }
    }

    /// Nearest fixed-point value to num/den (den > 0): error <= 1/2 ulp.
    pub fn from_ratio(num: &BigInt, den: &BigInt, scale: u32) -> Fx {
        debug_assert!(den.is_positive());
        Fx {
            m: round_div(&(num << scale), den),
            scale,
        }
    }

    pub fn add(&self, other: &Fx) -> Fx {
        assert_eq!(self.scale, other.scale, "scale mismatch");
        Fx {
            m: &self.m + &other.m,
            scale: self.scale,
        }
    }

    pub fn sub(&self, other: &Fx) -> Fx {
        assert_eq!(self.scale, other.scale, "scale mismatch");
        Fx {
            m: &self.m - &other.m,
            scale: self.scale,
        }
    }

    pub fn neg(&self) -> Fx {
        Fx {
            m: -&self.m,
            scale: self.scale,
        }
    }

    /// Rounded product: error <= 1/2 ulp.
    pub fn mul(&self, other: &Fx) -> Fx {
        assert_eq!(self.scale, other.scale, "scale mismatch");
        Fx {
            m: round_shift(&(&self.m * &other.m), self.scale),
            scale: self.scale,
        }
    }

    /// Exact product with an integer.
    pub fn mul_int(&self, k: &BigInt) -> Fx {
        Fx {
            m: &self.m * k,
            scale: self.scale,
        }
    }

    /// Rounded quotient (other != 0): error <= 1/2 ulp.
    pub fn div(&self, other: &Fx) -> Fx {
        assert_eq!(self.scale, other.scale, "scale mismatch");
        assert!(!other.m.is_zero(), "division by zero");
        let (num, den) = if other.m.is_negative() {
            (-(&self.m << self.scale), -&other.m)
        } else {
            (&self.m << self.scale, other.m.clone())
        };
        Fx {
            m: round_div(&num, &den),
            scale: self.scale,
        }
    }

    pub fn abs_ulps(&self) -> BigUint {
        self.m.magnitude().clone()
    }

    pub fn to_f64(&self) -> f64 {
        Ratio::new(self.m.clone(), BigInt::one() << self.scale)
            .to_f64()
            .expect("fixed-point value representable")
    }

    /// Natural logarithm via atanh series, valid for x in [1, 1.7):
    /// ln x = 2 sum_{k>=0} u^(2k+1) / (2k+1) with u = (x-1)/(x+1) in
    /// [0, 0.26). Returns (value, error in ulps).
    pub fn ln(&self) -> (Fx, u64) {
        let one = Fx::from_int(1, self.scale);
        assert!(self.m >= one.m, "ln domain: x >= 1");
        assert!(self.m < Fx::from_int(17, self.scale).m / 10, "ln domain: x < 1.7");
        let num = self.sub(&one);
        let den = self.add(&one);
        if num.m.is_zero() {
            return (Fx::zero(self.scale), 0);
        }
        let u = num.div(&den); // 1/2 ulp
        let u2 = u.mul(&u); // 1/2 ulp
        let mut term = u.clone();
        let mut sum = u.clone();
        let mut k: u64 = 1;
        let mut ops: u64 = 2;
        loop {
            term = term.mul(&u2); // 1/2 ulp each
            let denom = Fx {
                m: BigInt::from(2 * k + 1) << self.scale,
                scale: self.scale,
            };
            let contrib = term.div(&denom); // 1/2 ulp
            ops += 2;
            if contrib.m.is_zero() {
                break;
            }
            sum = sum.add(&contrib);
            k += 1;
            // u^2 < 0.068 makes the tail after a sub-ulp term < 1.1 ulp.
            if term.abs_ulps() < BigUint::from(2 * k + 1) {
                break;
            }
        }
        let result = Fx {
            m: &sum.m << 1,
            scale: self.scale,
        };
        // Rounding: <= ops ulps pre-doubling (so 2*ops after), truncation
        // tail <= 2 ulps, u propagation <= 4 ulps. Coarse but safe.
        (result, 2 * ops + 8)
    }

    /// exp(x) for |x| <= 0.8 by Taylor series. Returns (value, ulps).
    pub fn exp(&self) -> (Fx, u64) {
        let bound = Fx {
            m: (BigInt::from(4) << self.scale) / 5,
            scale: self.scale,
        };
        assert!(
            self.m.magnitude() <= bound.m.magnitude(),
            "exp domain: |x| <= 0.8"
        );
        let mut term = Fx::from_int(1, self.scale);
        let mut sum = Fx::from_int(1, self.scale);
        let mut k: u64 = 1;
        let mut ops: u64 = 0;
        loop {
            let kf = Fx {
                m: BigInt::from(k) << self.scale,
                scale: self.scale,
            };
            term = term.mul(self).div(&kf); // 1 ulp
            ops += 2;
            sum = sum.add(&term);
            // Once k >= 2 > 2|x| the terms at least halve, so a sub-ulp
            // term bounds the tail by 2 ulps.
            if k >= 2 && term.abs_ulps() < BigUint::one() + BigUint::one() {
                break;
            }
            k += 1;
        }
        (sum, ops + 4)
    }
}

/// Even-index Bernoulli numbers B_0, B_2, ..., B_(2*MAX_BERNOULLI) as exact
/// rationals, by the Pascal-triangle recurrence on sum C(m+1, j) B_j = 0.
/// 70 covers the largest correction order the zeta evaluator selects.
const MAX_BERNOULLI: usize = 70;

pub(crate) fn bernoulli_even() -> &'static [Ratio<BigInt>] {
    use std::sync::OnceLock;
    static CACHE: OnceLock<Vec<Ratio<BigInt>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let n = 2 * MAX_BERNOULLI + 2;
        let mut all: Vec<Ratio<BigInt>> = Vec::with_capacity(n + 1);
        // Binomials row by row; C(m+1, j) built incrementally.
        for m in 0..=n {
            if m == 0 {
                all.push(Ratio::one());
                continue;
            }
            // B_m = -1/(m+1) * sum_{j=0}^{m-1} C(m+1, j) B_j
            let mut acc = Ratio::<BigInt>::zero();
            let mut binom = BigInt::one(); // C(m+1, 0)
            for (j, b) in all.iter().enumerate().take(m) {
                acc += Ratio::from_integer(binom.clone()) * b;
                // C(m+1, j+1) = C(m+1, j) * (m+1-j) / (j+1)
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            all.push(-acc / Ratio::from_integer(BigInt::from(m + 1)));
        }
        (0..=MAX_BERNOULLI).map(|k| all[2 * k].clone()).collect()
    })
}

/// A decimal value together with an absolute error bound covering both the
/// truncation of the printed digits and the computation behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimalValue {
    /// Plain decimal string, truncated (not rounded) from a value whose
    /// distance to the true quantity is within `error_bound`.
    pub digits: String,
    /// Absolute error bound: |printed - true| <= error_bound.
    pub error_bound: f64,
}

impl DecimalValue {
    pub fn approx(&self) -> f64 {
        self.digits.parse().expect("digits parse as f64")
    }
}

/// Render a nonnegative Fx as a DecimalValue. `computed_error` is the
/// caller's bound on |fx - true|; printed digits extend two places past
/// it, and the stated bound absorbs the truncation.
pub(crate) fn to_decimal(fx: &Fx, computed_error: f64) -> DecimalValue {
    assert!(!fx.m.is_negative());
    let places = if computed_error <= 0.0 {
        (fx.scale as f64 * 0.301) as usize
    } else {
        ((-computed_error.log10()).floor().max(0.0) as usize) + 2
    };
    let places = places.clamp(1, 400);
    let ten = BigUint::from(10u32).pow(places as u32);
    let scaled = (fx.m.magnitude() * &ten) >> fx.scale; // floor
    let int_part = &scaled / &ten;
    let frac_part = &scaled % &ten;
    let digits = format!("{}.{:0>width$}", int_part, frac_part.to_string(), width = places);
    DecimalValue {
        digits,
        error_bound: computed_error + 10f64.powi(-(places as i32)),
    }
}
