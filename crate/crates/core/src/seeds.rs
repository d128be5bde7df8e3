//! Seed derivation for reproducible Monte-Carlo runs.
//!
//! One root seed fans out into independent substreams keyed by the *content*
//! of a simulation point (scheme name, compression factor, SNR), the frame
//! index, and a stream tag. Parallel and serial executions therefore draw
//! identical random numbers, and re-running a single point reproduces the
//! record it would have produced inside a sweep.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag for payload bit generation.
pub const STREAM_DATA: u64 = 0;
/// Stream tag for channel realization draws.
pub const STREAM_CHANNEL: u64 = 1;
/// Stream tag for receiver noise.
pub const STREAM_NOISE: u64 = 2;

/// SplitMix64 finalizer; full-period bijective mixer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines a parent seed with a child tag into a new seed.
pub fn mix(parent: u64, tag: u64) -> u64 {
    splitmix64(parent ^ splitmix64(tag))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed for one (scheme, alpha, snr) simulation point.
pub fn point_seed(root: u64, scheme: &str, alpha: f64, snr_db: f64) -> u64 {
    let mut s = mix(root, fnv1a(scheme.as_bytes()));
    s = mix(s, alpha.to_bits());
    mix(s, snr_db.to_bits())
}

/// Seed for one substream of one frame within a point.
pub fn frame_stream_seed(point_seed: u64, frame_idx: u64, stream: u64) -> u64 {
    mix(mix(point_seed, frame_idx), stream)
}

/// Deterministic RNG for a derived seed.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
