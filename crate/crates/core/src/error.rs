// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a discriminant (must be 0 or 1 mod 4)")]
    NotADiscriminant(i64),

    #[error("discriminant {0} is not a negative fundamental discriminant")]
    NotFundamental(i64),

    #[error("discriminant {0} is not supported here (need D <= -3)")]
    UnsupportedDiscriminant(i64),

    #[error("form ({a}, {b}, {c}) is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },

    #[error("form ({a}, {b}, {c}) does not have discriminant {disc}")]
    WrongDiscriminant { a: i64, b: i64, c: i64, disc: i64 },

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscMismatch(i64, i64),

    #[error("<{a}, (-{b}+sqrt({disc}))/2> is not an ideal basis (4a must divide b^2 - D)")]
    InvalidIdealBasis { a: i64, b: i64, disc: i64 },

    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("sieve limit {limit} exceeds the configured cap {cap}")]
    LimitTooLarge { limit: u64, cap: u64 },

    #[error("class number exceeds the configured cap {cap}")]
    ClassNumberTooLarge { cap: usize },

    #[error("variance identity violated: definitional {definitional} vs dual {dual}")]
    IdentityMismatch { definitional: f64, dual: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
