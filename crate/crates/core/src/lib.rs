//! Enumeration and counting of Latin squares and their equivalence classes.

pub mod admissible;
pub mod assembly;
pub mod audit;
pub mod canon;
pub mod census;
pub mod cover;
pub mod error;
pub mod group;
pub mod iso;
pub mod onefact;
pub mod seeds;
pub mod square;

pub use error::{Error, Result};

use num_bigint::BigUint;

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k))
}

/// Serializes a big integer as a decimal string.
pub fn serialize_biguint<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}
