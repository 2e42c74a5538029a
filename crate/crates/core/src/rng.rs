//! Deterministic 64-bit generator (splitmix64) used for all sampling.
//!
//! Fixed here rather than taken from a crate so that identical seeds
//! reproduce identical matrices across toolchains and reimplementations.
//! Bounded draws use modulo reduction; the bias is irrelevant at our ranges
//! and keeps the stream trivially portable.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, n)`; `n` must be nonzero.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            v.swap(i, j);
        }
    }
}

/// Derives an independent stream seed from a base seed and a tag. Used to
/// give every trial / subtask its own reproducible generator.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut rng = SplitMix64::new(seed ^ tag.wrapping_mul(0xA24B_AED4_963E_E407));
    rng.next_u64()
}
