//! Seedable, splittable random streams.
//!
//! Every stochastic operation in this crate takes an explicit stream (or a
//! master seed from which it derives sub-streams), so identical seeds give
//! identical results regardless of thread scheduling. ChaCha's independent
//! stream counter is used for splitting: lane `i` of seed `s` never overlaps
//! lane `j != i`.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The crate-wide random stream type.
pub type Stream = ChaCha12Rng;

/// Root stream for a master seed (lane 0).
pub fn master(seed: u64) -> Stream {
    substream(seed, 0)
}

/// Independent stream for `(seed, lane)`. Streams with distinct lanes are
/// statistically independent and may be handed to parallel workers.
pub fn substream(seed: u64, lane: u64) -> Stream {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(lane);
    rng
}
