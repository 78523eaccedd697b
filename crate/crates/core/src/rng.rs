//! Seeded random number generation.
//!
//! Every stochastic routine in the crate draws from [`Rng`], a
//! xoshiro256++ generator. Its output is fully specified by the algorithm,
//! so a given [`Seed`] yields bit-identical sequences on every platform.
//! Independent tasks never share a generator; they derive child seeds with
//! [`Seed::derive`].

use rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

pub use rand::Rng as RngExt;

/// The generator used throughout the crate.
pub type Rng = rand_xoshiro::Xoshiro256PlusPlus;

/// A 64-bit seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub const fn new(seed: u64) -> Self {
        Seed(seed)
    }

    /// A fresh generator positioned at the start of this seed's stream.
    pub fn rng(self) -> Rng {
        Rng::seed_from_u64(self.0)
    }

    /// Child seed for sub-task `index`. Distinct indices give
    /// statistically independent streams.
    pub fn derive(self, index: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d))))
    }

    /// Child seed addressed by a path of indices, e.g. `(cell, realization)`.
    pub fn derive_path(self, path: &[u64]) -> Seed {
        path.iter().fold(self, |s, &i| s.derive(i))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
