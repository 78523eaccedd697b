//! Predictive asymmetry: a causality test built on transfer entropy.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
extern crate alloc;

pub mod asymmetry;
pub mod data;
pub mod embedding;
pub mod error;
pub mod estimators;
pub mod oracle;
pub mod resampling;
pub mod rng;
pub mod robustness;
pub mod stats;
pub mod systems;

pub use error::{Error, Result};
pub use rng::Seed;
