//! File formats, parallel Monte Carlo, the verification suite and the
//! report builders behind the `regretlab` command line.
//!
//! The numerical work lives in [`regretlab_core`]; this crate adds the
//! parts that need `std`.

pub mod error;
pub mod io;
pub mod montecarlo;
pub mod report;
pub mod verify;

pub use error::{AppError, AppResult};

/// Master seed used when neither a config file nor `--seed` supplies one.
pub const DEFAULT_SEED: u64 = 0x5eed;
