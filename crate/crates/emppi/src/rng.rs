//! Deterministic derivation of independent random streams from one master seed.
//!
//! Every consumer of randomness (noise sampling for rollout `(cycle, k, n)`,
//! observation noise, belief initialization, resampling) gets its own stream
//! keyed by the master seed plus a role tag and up to three indices. Streams
//! never share state, so the draws one consumer makes cannot shift another
//! consumer's sequence. This is what makes full episodes bit-reproducible.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Role tags keeping unrelated streams apart even for equal indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    /// Control perturbations for one `(cycle, k, n)` rollout.
    RolloutNoise,
    /// Per-cycle measurement noise added to the plant state.
    Observation,
    /// Initial particle draws from the prior.
    BeliefInit,
    /// Jittered redraw when the belief degenerates.
    Resample,
    /// Free tag for tests and auxiliary tooling.
    Auxiliary,
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::RolloutNoise => 0x726f6c6c6f7574,
            StreamKind::Observation => 0x6f627365727665,
            StreamKind::BeliefInit => 0x62656c696566,
            StreamKind::Resample => 0x726573616d70,
            StreamKind::Auxiliary => 0x617578,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the stream for `(seed, kind, a, b, c)`.
///
/// The same five-tuple always yields the same generator, on every platform.
/// Unused indices should be passed as 0.
pub fn stream(seed: u64, kind: StreamKind, a: u64, b: u64, c: u64) -> ChaCha8Rng {
    let mut state = seed;
    // Absorb each component through a full mix round so that nearby
    // (seed, index) tuples land on unrelated ChaCha keys.
    for word in [kind.tag(), a, b, c] {
        let mixed = splitmix64(&mut state);
        state ^= word.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ mixed;
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn draws(rng: &mut ChaCha8Rng, len: usize) -> Vec<u64> {
        (0..len).map(|_| rng.random()).collect()
    }

    #[test]
    fn same_tuple_same_stream() {
        let a = draws(&mut stream(7, StreamKind::RolloutNoise, 3, 1, 4), 16);
        let b = draws(&mut stream(7, StreamKind::RolloutNoise, 3, 1, 4), 16);
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_tuples_distinct_streams() {
        let base = draws(&mut stream(7, StreamKind::RolloutNoise, 3, 1, 4), 4);
        let variants = [
            stream(8, StreamKind::RolloutNoise, 3, 1, 4),
            stream(7, StreamKind::Observation, 3, 1, 4),
            stream(7, StreamKind::RolloutNoise, 2, 1, 4),
            stream(7, StreamKind::RolloutNoise, 3, 2, 4),
            stream(7, StreamKind::RolloutNoise, 3, 1, 5),
        ];
        for mut v in variants {
            assert_ne!(base, draws(&mut v, 4));
        }
    }

    #[test]
    fn index_order_matters() {
        let ab = draws(&mut stream(1, StreamKind::Auxiliary, 10, 20, 0), 4);
        let ba = draws(&mut stream(1, StreamKind::Auxiliary, 20, 10, 0), 4);
        assert_ne!(ab, ba);
    }
}
