//! Sampled fictitious play with Bernoulli sampling, the regret bounds that
//! govern it, and exact enumeration oracles for the anti-concentration
//! machinery behind those bounds.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! Monte Carlo and the command line live in the `regretlab` crate.
//!
//! Strategies are 1-based at every public boundary (see [`Strategy`]).

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adversaries;
pub mod bounds;
mod error;
pub mod game;
pub mod harness;
pub mod learners;
pub mod smallball;

pub use error::{Error, Result};
pub use game::{CumulativeState, PayoffVector, RegretTrace, Sign, StrategicGame, Strategy};

/// Generator used for every random stream in an episode.
pub type EpisodeRng = rand_chacha::ChaCha8Rng;

/// Largest history length (or sign-vector length) the exhaustive oracles accept.
pub const ENUMERATION_GUARD: usize = 24;
