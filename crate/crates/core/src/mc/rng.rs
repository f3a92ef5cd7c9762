//! Counter-based substreams.
//!
//! Every random draw comes from a ChaCha8 generator keyed by
//! `(seed, component)` and positioned on stream `sample`. Any sample or
//! component can be regenerated on its own, bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Component id reserved for per-sample coin flips.
pub const COIN_COMPONENT: u64 = u64::MAX;

pub fn substream(seed: u64, sample: u64, component: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&component.to_le_bytes());
    key[16..24].copy_from_slice(b"svsetrng");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(sample);
    rng
}
