//! Exact counting, enumeration and bound checking for additive 2-bases.
//!
//! A set `X ⊆ [n]₀ = {0, ..., n}` is an additive 2-base for `n` when every
//! `k ∈ [n]₀` is a sum `x + y` with `x, y ∈ X`. This crate counts them
//! exactly ([`count`]), computes the exact and sampled probabilities that a
//! uniformly random subset misses a given sum ([`probability`]), and
//! certifies the exponential lower-bound chain in exact rational arithmetic
//! ([`bounds`]).

pub mod bounds;
pub mod cache;
pub mod count;
pub mod error;
pub mod exec;
pub mod oeis;
pub mod probability;
pub mod sumset;

pub use count::{Ceilings, CountRecord, Counter, GrowthRow, Method};
pub use error::{Error, Result};
pub use exec::Exec;
pub use sumset::{complete, is_two_base, sumset, uncovered, SubsetMask, SumsetMask};
