//! Deterministic RNG stream derivation.
//!
//! All simulators draw from ChaCha8 streams keyed by
//! `(master seed, purpose tag, replica id)`. ChaCha is a counter-based
//! generator, so replicas can run in any order or in parallel and still
//! produce identical output; merging replica results in replica order makes
//! whole runs independent of the degree of parallelism.
//!
//! The 256-bit key is derived with a splitmix64 chain over the master seed,
//! an FNV-1a hash of the purpose tag, and the replica id. This is a
//! fixed, documented scheme — not configurable — so a `(seed, purpose,
//! replica)` triple means the same stream forever.

use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng as Stream;

const SPLITMIX_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(SPLITMIX_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives the ChaCha8 stream for `(seed, purpose, replica)`.
pub fn stream(seed: u64, purpose: &str, replica: u64) -> Stream {
    let mut state = seed ^ fnv1a64(purpose.as_bytes()).rotate_left(17) ^ replica.wrapping_mul(SPLITMIX_GAMMA);
    // fold each component in again through the mixer so that no two inputs
    // collide by cancellation
    state = state.wrapping_add(splitmix64(&mut { seed }));
    state = state.wrapping_add(splitmix64(&mut { fnv1a64(purpose.as_bytes()) }));
    state = state.wrapping_add(splitmix64(&mut { replica }));
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    Stream::from_seed(key)
}
