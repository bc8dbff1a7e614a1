//! Seeding.
//!
//! Every random draw comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), whose
//! output is specified independently of platform and word size. A trial
//! seed selects the key; each consumer reads its own ChaCha stream id, so
//! the label, edge, split and clustering draws never share a sequence.
//!
//! Per-trial seeds are derived from the master seed with SplitMix64 (see
//! [`derive_seed`]), which lets trials run in any order or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Labels = 1,
    Edges = 2,
    Split = 3,
    Clustering = 4,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at sweep point `scale_index`:
/// `splitmix64(splitmix64(splitmix64(master) ^ scale_index) ^ trial)`.
pub fn derive_seed(master: u64, scale_index: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ scale_index) ^ trial)
}
