//! Seedable random streams.
//!
//! All randomized routines use ChaCha8 seeded from a 64-bit seed; each
//! independent work item (path, day, replicate) draws from its own stream so
//! results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Generator for work item `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fresh seed from the operating system, for callers that did not supply one.
pub fn fresh_seed() -> u64 {
    rand::random()
}
