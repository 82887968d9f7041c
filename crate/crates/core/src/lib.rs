//! Exact arithmetic for degree-3 Jordan structures.
//!
//! The crate builds cubic norm structures (étale, hermitian, Tits process
//! and isotope models) over the rationals, and certifies norm-similarity
//! identities by exact evaluation. Everything here is `no_std` with `alloc`;
//! IO, configuration and parallel sweeps live in the `albert-forge` crate.

#![no_std]

extern crate alloc;

pub mod assoc;
pub mod catalog;
pub mod conformal;
pub mod cubic;
pub mod error;
pub mod etale;
pub mod linalg;
pub mod mutation;
pub mod rational;
pub mod strgroup;
pub mod tits;

pub use error::{Error, Result};
pub use rational::Q;
