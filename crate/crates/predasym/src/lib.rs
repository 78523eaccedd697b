//! Predictive-asymmetry causality test with file IO, parallel runners and
//! a command-line front end.
//!
//! The numerical core lives in `predasym-core` and is re-exported here.

pub use predasym_core::*;

pub mod cli;
pub mod error;
pub mod io;
pub mod parallel;
