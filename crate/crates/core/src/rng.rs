//! Named random substreams.
//!
//! Every random decision in the crate draws from a ChaCha stream derived from
//! a master seed and a stream name, so that adding randomness in one stage
//! never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub mod streams {
    pub const FAMILY: &str = "family";
    pub const PROJECTIONS: &str = "projections";
    pub const SAMPLING: &str = "sampling";
    pub const CENTERS: &str = "centers";
    pub const TRIALS: &str = "trials";
    pub const IMPUTE: &str = "impute";
    pub const LLOYD: &str = "lloyd";
    pub const GENERATOR: &str = "generator";
}

// FNV-1a; stable across platforms and releases, unlike std's hasher.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for the substream `name` of `seed`.
pub fn derive_seed(seed: u64, name: &str) -> u64 {
    splitmix(seed ^ splitmix(fnv1a(name.as_bytes())))
}

/// Seed for the `index`-th child of substream `name` (e.g. one per trial).
pub fn derive_indexed(seed: u64, name: &str, index: u64) -> u64 {
    splitmix(derive_seed(seed, name) ^ splitmix(index.wrapping_add(1)))
}

pub fn substream(seed: u64, name: &str) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, name))
}

pub fn indexed_substream(seed: u64, name: &str, index: u64) -> Rng {
    Rng::seed_from_u64(derive_indexed(seed, name, index))
}
