//! Simulation engine, file formats and command-line front end for
//! polar-coded modulation.
//!
//! The numerical core lives in [`polarcm_core`]; this crate adds
//! deterministic parallel Monte-Carlo campaigns, code construction for whole
//! schemes, rate-versus-SNR sweeps, variance curves and their JSON/CSV
//! formats.

#![deny(unsafe_code)]
#![warn(missing_docs)]

pub mod bits;
pub mod config;
pub mod construct;
pub mod curves;
pub mod engine;
mod error;
pub mod output;
pub mod sim;
pub mod tables;

pub use error::{Error, Result};
pub use polarcm_core as core;
