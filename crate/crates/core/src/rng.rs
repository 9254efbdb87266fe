//! Seeded, named random streams.
//!
//! Every random draw in the crate comes from a [`SeedStream`]: one root seed,
//! fanned out into independent ChaCha streams addressed by a label and a
//! counter. Two consumers asking for different `(label, index)` pairs never
//! share a stream, so results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A child stream whose root seed mixes in `label`. Useful for handing a
    /// whole sub-computation its own namespace.
    pub fn derive(&self, label: &str) -> SeedStream {
        SeedStream {
            seed: splitmix(self.seed ^ fnv1a(label.as_bytes())),
        }
    }

    /// A child stream addressed by an integer, e.g. one per evaluation.
    pub fn fork(&self, index: u64) -> SeedStream {
        SeedStream {
            seed: splitmix(self.seed ^ splitmix(index.wrapping_add(0x5851_f42d_4c95_7f2d))),
        }
    }

    /// Random generator for `(label, index)`.
    pub fn rng(&self, label: &str, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(splitmix(fnv1a(label.as_bytes()) ^ splitmix(index)));
        rng
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
