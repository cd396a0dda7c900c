//! Polar-coded modulation.
//!
//! Binary polar codes and their combination with `2^m`-ary ASK/QAM
//! signalling, built on a single abstraction: the *binary partition* of a
//! channel into ordered (sequential) or independent (parallel) bit channels.
//!
//! * [`gf2`]: dense matrices over GF(2) (generators, permutations, labeling transforms).
//! * [`labeling`]: set-partitioning and Gray label tables and the SP→Gray transforms.
//! * [`channels`]: BEC/BSC/BiAWGN bit channels and the modulated AWGN channel with exact demappers.
//! * [`partition`]: bit-channel profiles, exact BEC recursion, concatenation laws, Monte-Carlo capacities.
//! * [`polar`]: polar encoder, successive-cancellation decoder, construction, DE with Gaussian approximation.
//! * [`schemes`]: multilevel and bit-interleaved polar-coded modulation.
//!
//! The crate is `no_std` (with `alloc`); everything that needs threads or
//! files lives in the `polarcm` companion crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod channels;
mod error;
pub mod gf2;
pub mod labeling;
pub mod math;
pub mod partition;
pub mod polar;
pub mod schemes;

pub use error::{Error, Result};
