//! Counter-based RNG substreams.
//!
//! Every random quantity in a drop is drawn from a stream keyed by
//! `(master seed, drop index, purpose, index)`, so the same drop produces the
//! same numbers whether drops run serially, in parallel, or are regenerated
//! on demand.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// What a substream is used for. The discriminant is mixed into the key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Users = 1,
    LosState = 2,
    Shadow = 3,
    Indoor = 4,
    SmallScale = 5,
    Schedule = 6,
    Pilots = 7,
    SrsNoise = 8,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed material for one drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DropSeed(u64);

impl DropSeed {
    pub fn new(master: u64, drop_index: u64) -> Self {
        DropSeed(splitmix64(splitmix64(master) ^ drop_index.wrapping_mul(0xa076_1d64_78bd_642f)))
    }

    pub fn stream(&self, purpose: Purpose, index: u64) -> SimRng {
        let key = splitmix64(self.0 ^ splitmix64((purpose as u64) << 48 ^ index));
        let mut seed = [0u8; 32];
        let mut k = key;
        for chunk in seed.chunks_mut(8) {
            k = splitmix64(k);
            chunk.copy_from_slice(&k.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

/// Convenience for tests and one-off computations.
pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
