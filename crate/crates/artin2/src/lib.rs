// SPDX-License-Identifier: Apache-2.0

//! Density machinery for the primes p at which one rational number lies
//! in the multiplicative subgroup of (Z/p)* generated by another.
//!
//! For a fixed pair of nonzero rationals (a, b), the primes p (away from
//! numerators and denominators) with b mod p in <a mod p> have a natural
//! density. When a and b are multiplicatively independent and the
//! quotient of Q* by <-1, a, b> is torsionfree, that density is a
//! rational multiple c_{a,b} * S of the universal constant
//!
//! ```text
//! S = prod over primes (1 - p / (p^3 - 1)) = 0.5759599688929...,
//! ```
//!
//! with c_{a,b} an explicit product over the quadratic discriminants of
//! a, b and ab. (The classical primitive-root density story is the
//! single-generator degeneration of this setup; the two-variable value
//! is unconditional in the heuristic model and follows from GRH in the
//! same way.)
//!
//! The crate computes all of the pieces independently so they can be
//! played against each other:
//!
//! * [`density`]: exact closed forms (the coefficient c_{a,b}, the
//!   conditioned lattice sums, field degrees) in big-rational
//!   arithmetic.
//! * [`constants`]: S to hundreds of certified digits via a
//!   zeta-product expansion with explicit error ledgers, plus direct
//!   Euler products as slow cross-checks.
//! * [`oracle`]: rectangular truncations of the defining double sums
//!   with proven tail bounds; independent of the closed forms.
//! * [`empirics`]: exact membership counts over prime ranges via
//!   multiplicative orders.
//! * [`recurrences`]: the second-order linear recurrence front end that
//!   reduces divisor-of-a-sequence questions to membership pairs.
//!
//! Supporting layers: [`rational`] (factored rationals, discriminants,
//! independence and torsion tests), [`primes`] (sieves, factoring),
//! [`precision`] (dyadic fixed point with ulp accounting), [`error`].

pub mod constants;
pub mod density;
pub mod empirics;
pub mod error;
pub mod oracle;
pub mod precision;
pub mod primes;
pub mod rational;
pub mod recurrences;

pub use density::{
    c_torsionfree, delta_exact, e_factor, f_degree_loss, field_degree, r_factor, smn_closed,
    s2n_prime, ExactRational, SMultiple,
};
pub use empirics::{
    count_range, dump_observations, is_member, order_mod_p, per_q_fraction, CountReport,
    PerQFraction, PrimeObservation,
};
pub use error::{Error, Result};
pub use oracle::{
    artin_truncated, delta_i_truncated, delta_truncated, smn_truncated, OracleResult,
    TruncationWindow,
};
pub use rational::{
    classify_pair, discriminant, factor_rational, multiplicatively_independent, radical_support,
    torsion_order, FactoredRational, NonzeroRational, PairClassification,
};
pub use recurrences::{
    classify, prime_divisors_of_sequence, reduce_to_pair, sequence_terms, BigRational,
    DensityOutcome, PairReduction, RecurrenceClassification, RecurrenceKind, RecurrenceSpec,
};
