//! Keyed random streams.
//!
//! Every random object in a run is drawn from its own ChaCha8 stream whose
//! seed is derived from the scenario seed and a path of indices, e.g.
//! `(seed, NETWORK, net)` or `(seed, FADING, net, draw, m, n)`. Streams are
//! therefore independent of evaluation order and thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tag for network geometry (positions and clustering).
pub const NETWORK: u64 = 0x6e65_7477;
/// Domain tag for small-scale fading draws.
pub const FADING: u64 = 0x6661_6465;
/// Domain tag for test and diagnostic profiles.
pub const PROFILE: u64 = 0x7072_6f66;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a 64-bit key from a root seed and an index path.
pub fn derive_key(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Opens the stream for `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_key(seed, path))
}
