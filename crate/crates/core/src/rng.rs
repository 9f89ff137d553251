// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seed derivation.
//!
//! Every random quantity is drawn from a ChaCha8 stream keyed by a 64-bit
//! seed; replicate `k` of a loop reads stream `k` of that key, so results do
//! not depend on how replicates are scheduled across threads. Nested loops
//! (segmentation nodes, simulation replicates) first derive a child seed with
//! [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for replicate `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `(tag, index)` under `seed`.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ tag) ^ index)
}
