// SPDX-License-Identifier: Apache-2.0

//! Class groups of imaginary quadratic fields and how prime ideals are
//! distributed among their classes.
//!
//! - [`qform`]: reduction and composition of positive definite binary forms
//! - [`classgroup`]: the form class group, its cyclic decomposition and characters
//! - [`arith`]: Kronecker symbol, prime splitting, representation numbers, `L(1, χ_D)`
//! - [`sieve`]: segmented prime sieve
//! - [`stats`]: weighted prime-ideal sums per class and character, variance,
//!   least primes and exceptional-class counts
//! - [`heegner`]: Heegner points of classes and coefficient-size diagnostics

pub mod arith;
pub mod classgroup;
pub mod error;
pub mod heegner;
pub mod qform;
pub mod sieve;
pub mod stats;

pub use classgroup::{Character, ClassGroup, ClassGroupOptions};
pub use error::{Error, Result};
pub use qform::{Discriminant, QuadForm, ReducedForm};
