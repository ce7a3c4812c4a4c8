//! Per-shot random streams.
//!
//! Shot `k` of a run seeded with `s` draws from ChaCha8 keyed by `s` on stream
//! `k`. Streams are addressed by counter, so a shot's draws do not depend on
//! which worker runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ShotRng = ChaCha8Rng;

pub fn shot_rng(seed: u64, shot: u64) -> ShotRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}
