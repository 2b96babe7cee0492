//! Deterministic random number generation.
//!
//! All randomness in the crate flows through [`SeededRng`], a ChaCha8 stream
//! cipher RNG with float/Gaussian conversion done locally so generated
//! corpora and initialized models are bitwise reproducible from a `u64` seed.
//! Independent streams are derived from a master seed with [`derive_seed`],
//! so parallel jobs (one stream per clip, per model, per epoch) stay
//! reproducible regardless of scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with a list of stream tags into a new seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = master ^ 0xA076_1D64_78BD_642F;
    let mut out = splitmix64(&mut state);
    for &tag in tags {
        state ^= tag.wrapping_mul(0xE703_7ED1_A0B4_28DB);
        out ^= splitmix64(&mut state);
    }
    out
}

/// Seeded deterministic RNG.
pub struct SeededRng {
    inner: ChaCha8Rng,
    spare_gaussian: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        SeededRng {
            inner: ChaCha8Rng::from_seed(key),
            spare_gaussian: None,
        }
    }

    /// New RNG on an independent stream of `master`.
    pub fn derived(master: u64, tags: &[u64]) -> Self {
        SeededRng::new(derive_seed(master, tags))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `[0, n)`; `n` must be nonzero.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// Standard normal sample (Box-Muller).
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        let u1 = loop {
            let u = self.uniform();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.uniform();
        let radius = crate::math::sqrt(-2.0 * crate::math::ln(u1));
        let angle = crate::math::TWO_PI * u2;
        self.spare_gaussian = Some(radius * crate::math::sin(angle));
        radius * crate::math::cos(angle)
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
