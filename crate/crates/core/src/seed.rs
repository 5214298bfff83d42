//! Deterministic randomness.
//!
//! Every randomized operation takes a generator handle. Parallel work derives
//! a child generator from the run seed plus a path of indices, so results do
//! not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator used throughout the crate.
pub type AugRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> AugRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Child generator for the work item identified by `path`.
    ///
    /// Distinct paths give independent streams; the same path always gives
    /// the same stream.
    pub fn derive(self, path: &[u64]) -> AugRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream_id(path));
        rng
    }

    /// A new seed for a sub-experiment, itself derivable further.
    pub fn child(self, path: &[u64]) -> Seed {
        let mut h = splitmix64(self.0 ^ 0xa076_1d64_78bd_642f);
        for &p in path {
            h = splitmix64(h ^ p);
        }
        Seed(h)
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

fn stream_id(path: &[u64]) -> u64 {
    // length is mixed in so that [] and [0] differ
    let mut h = splitmix64(path.len() as u64);
    for &p in path {
        h = splitmix64(h ^ p);
    }
    h
}
