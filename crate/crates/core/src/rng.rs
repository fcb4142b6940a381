//! Reproducible random streams for instance generation.
//!
//! Every stream is a ChaCha8 keystream (RFC 8439 core, 8 rounds) keyed by
//! four consecutive SplitMix64 outputs of a 64-bit seed. Instance seeds are
//! derived from an ensemble seed and an instance index with
//! [`instance_seed`], so an ensemble can be regenerated one member at a time
//! in any order. Gaussian variates use the inverse-CDF transform of
//! [`crate::evt::inv_norm_cdf`] on open-interval uniforms, which keeps the
//! sample sequence independent of platform normal samplers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::evt::inv_norm_cdf;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer (Steele, Lea and Flood).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for member `index` of the ensemble seeded with `ensemble`:
/// `splitmix64(ensemble ^ splitmix64(index))`.
pub fn instance_seed(ensemble: u64, index: u64) -> u64 {
    splitmix64(ensemble ^ splitmix64(index))
}

/// Deterministic random stream.
#[derive(Debug, Clone)]
pub struct SeedStream {
    rng: ChaCha8Rng,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            state = state.wrapping_add(GOLDEN_GAMMA);
            chunk.copy_from_slice(&splitmix64(state).to_le_bytes());
        }
        Self {
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw on the open interval (0, 1) with 53-bit resolution.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        // uniform_open never returns 0 or 1
        inv_norm_cdf(self.uniform_open()).expect("open-interval uniform")
    }

    /// Fair coin from the top bit of the next word.
    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}
