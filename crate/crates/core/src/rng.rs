//! Counter-based random streams.
//!
//! A stream is identified by `(seed, stream id)` and can be positioned at any
//! draw index, so parallel producers partition the counter space instead of
//! sharing a generator.

use rand_chacha::ChaCha12Rng;
use rand_core::{Rng, SeedableRng};

pub struct UniformStream {
    rng: ChaCha12Rng,
}

impl UniformStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Stream positioned so that the next draw is draw number `index`.
    pub fn at(seed: u64, stream: u64, index: u64) -> Self {
        let mut s = Self::new(seed, stream);
        // one u64 consumes two 32-bit words
        s.rng.set_word_pos(2 * index as u128);
        s
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in the open interval (0, 1).
    pub fn next_open01(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..k`.
    pub fn next_index(&mut self, k: usize) -> usize {
        ((self.next_open01() * k as f64) as usize).min(k - 1)
    }
}

/// Mixes several words into one 64-bit seed (splitmix64 finaliser chain).
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut acc = 0x9E37_79B9_7F4A_7C15u64;
    for &p in parts {
        let mut z = acc ^ p.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        acc = z ^ (z >> 31);
    }
    acc
}
