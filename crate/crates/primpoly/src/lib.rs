//! Generation and testing of random primitive polynomials over finite fields.
//!
//! The crate has three layers:
//!
//! - exact finite-field algebra and classical primitivity oracles
//!   ([`ffield`], [`numstats`]),
//! - a small qubit gate IR with the shift-register multiplier construction
//!   ([`circuit`]) and dense/sparse statevector simulation ([`sim`]),
//! - the two randomized procedures built on top of them: primitivity testing
//!   by subgroup order finding ([`orderprim`]) and random search for
//!   primitive elements with additive-shift invariance tests
//!   ([`elemsearch`]).
//!
//! Everything is deterministic given a seed; see [`rng`] for the stream
//! conventions. The crate is `no_std` (with `alloc`); IO, file formats and
//! the CLI live in the companion `primpoly-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod circuit;
pub mod elemsearch;
pub mod error;
pub mod ffield;
pub mod numstats;
pub mod orderprim;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
