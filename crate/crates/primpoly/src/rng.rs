//! Seeded, counter-based random streams.
//!
//! All sampling in this crate runs on ChaCha8. A `(seed, stream)` pair fully
//! determines a stream, so independent units of work (Monte Carlo samples,
//! order-finding trials, search candidates) each take their own stream index
//! and results do not depend on execution order or worker count.

pub use rand_chacha::ChaCha8Rng;

use rand::SeedableRng;

/// Root stream for a seed (stream index 0).
pub fn from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
