//! Counter-based RNG substreams.
//!
//! Every random choice in a run is drawn from a stream keyed by the master
//! seed and an index path such as `(trial, sample, walk)`. Results therefore
//! do not depend on execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags keep streams for different purposes apart.
pub mod tag {
    pub const SAMPLE: u64 = 0x5a4d_504c;
    pub const WALK: u64 = 0x5741_4c4b;
    pub const TRIAL: u64 = 0x5452_4941;
    pub const GENERATE: u64 = 0x4745_4e45;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and an index path.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |h, &x| {
            splitmix64(h.wrapping_mul(0xd1b5_4a32_d192_ed03) ^ splitmix64(x))
        })
}

pub fn substream(seed: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}

/// Seed of trial `trial` in a batch run with master seed `master`.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    derive_seed(master, &[tag::TRIAL, trial])
}
