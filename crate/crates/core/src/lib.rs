//! Exact computation in Coxeter groups and positive Artin (braid) monoids,
//! factorization-poset combinatorics, and a finite poset/category topology
//! toolkit, together with a batch verification layer that exercises the
//! combinatorial theorems on concrete Coxeter types at desk scale.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature for embedded use. All values are immutable after
//! construction and all enumerations are deterministic: collections are
//! ordered, and the only randomness is a seeded PRNG owned by the caller.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod artin;
pub mod coxeter;
pub mod error;
pub mod field;
pub mod schubert;
pub mod topo;
pub mod verify;
pub mod words;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
