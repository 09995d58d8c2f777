// SPDX-License-Identifier: Apache-2.0

//! Shared error type.
//!
//! Every fallible operation in this crate returns [`Error`]. Variants are
//! split by what the caller can do about them: mathematical preconditions
//! (`DependentPair`, `NotTorsionfree`, ...) are permanent for the given
//! input, while operational limits (`FactorizationFailure`,
//! `CeilingExceeded`, `ValueOutOfRange`) can be lifted by raising the
//! relevant bound.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Trial division, Miller-Rabin and Pollard rho all gave up on a
    /// cofactor. Practically unreachable for 64-bit inputs; kept so the
    /// factoring budget is explicit rather than an infinite loop.
    #[error("factorization gave up on cofactor {0}")]
    FactorizationFailure(u64),

    /// The pair generates a rank <= 1 multiplicative group, so no
    /// two-variable density is defined for it.
    #[error("a and b are multiplicatively dependent")]
    DependentPair,

    /// The closed-form coefficient requires the quotient group modulo
    /// <-1, a, b> to be torsionfree; it has an element of the given order.
    #[error("pair has torsion of order {0}; no closed-form coefficient")]
    NotTorsionfree(u64),

    /// A perfect rational square where a non-square is required.
    #[error("input is a perfect rational square")]
    SquareInput,

    /// Sum identities for the index-lattice series skip this residue class
    /// (n = 2 mod 4 collapses to the 4 | n case and is rejected rather than
    /// silently remapped).
    #[error("n = {0} is 2 mod 4, outside the supported residue classes")]
    UnsupportedResidue(u64),

    /// Divisibility precondition violated (for example j1 must divide j in
    /// single-variable degree computations).
    #[error("{divisor} does not divide {of}")]
    NotDivisor { divisor: u64, of: u64 },

    /// A prime-range request went past the configured sieve ceiling.
    #[error("range end {requested} exceeds configured ceiling {ceiling}")]
    CeilingExceeded { requested: u64, ceiling: u64 },

    /// The rational cannot be reduced at p (p divides a numerator or
    /// denominator), so orders mod p are undefined.
    #[error("bad reduction at p = {p}: p divides numerator or denominator of {value}")]
    BadReduction { value: String, p: u64 },

    /// Writing observations to the caller-supplied sink failed.
    #[error("observation sink failed: {0}")]
    SinkFailure(String),

    /// Linear system for recurrence coefficients is singular (equal
    /// characteristic roots).
    #[error("degenerate coefficient system: equal characteristic roots")]
    DegenerateSystem,

    /// Argument outside the supported numeric range (overflow guard, digit
    /// caps, window caps).
    #[error("value out of supported range: {0}")]
    ValueOutOfRange(String),

    /// Malformed or mathematically meaningless argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::SinkFailure(e.to_string())
    }
}
