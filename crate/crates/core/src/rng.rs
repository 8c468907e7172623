//! Seeded, splittable randomness.
//!
//! Every stream is a `ChaCha8Rng`. Independent streams for parallel trials
//! are derived from `(master_seed, key, index)`: the 64-bit seed is
//! `splitmix64(master_seed ^ splitmix64(key))`, and `index` selects the
//! ChaCha stream. Index sampling always goes through `u64` so results do not
//! depend on the pointer width.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Identifier recorded alongside results so runs can be replayed.
pub const RNG_ALGORITHM: &str = "chacha8-splitmix64-stream-v1";

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The stream for item `index` under `key` (e.g. a grid cell) of a run.
pub fn derive(master_seed: u64, key: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master_seed ^ splitmix64(key)));
    rng.set_stream(index);
    rng
}

/// Packs `(n, d)` into a stream key.
pub fn grid_key(n: usize, d: usize) -> u64 {
    ((n as u64) << 32) | d as u64
}

/// Uniform integer in `[0, bound)`, `bound > 0`.
#[inline]
pub fn index<R: Rng + ?Sized>(rng: &mut R, bound: usize) -> usize {
    rng.gen_range(0..bound as u64) as usize
}

#[inline]
pub fn index_in<R: Rng + ?Sized>(rng: &mut R, lo: usize, hi: usize) -> usize {
    rng.gen_range(lo as u64..hi as u64) as usize
}
