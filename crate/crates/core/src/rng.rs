//! Deterministic random streams.
//!
//! Trial-level streams are keyed by `(seed, trial_index)` so trials can run
//! in any order, on any thread, and still reproduce bit-for-bit. Vertex-level
//! streams are keyed by the vertex's path from the root, so a vertex's
//! randomness does not depend on the order in which vertices are visited.

use rand::SeedableRng;
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

pub type TrialRng = Xoshiro256PlusPlus;
pub type VertexRng = SplitMix64;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream identifier for `(seed, index)`.
#[inline]
pub fn stream_id(seed: u64, index: u64) -> u64 {
    splitmix(splitmix(seed) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    TrialRng::seed_from_u64(stream_id(seed, trial))
}

/// Key of child `child` of the vertex keyed `parent`.
#[inline]
pub fn child_key(parent: u64, child: usize) -> u64 {
    stream_id(parent, child as u64 + 1)
}

#[inline]
pub fn vertex_rng(key: u64) -> VertexRng {
    VertexRng::seed_from_u64(key)
}
