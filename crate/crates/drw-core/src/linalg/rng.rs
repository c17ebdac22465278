//! SplitMix64 pseudo-random generator.
//!
//! The iterative eigensolver needs a reproducible starting vector so that
//! repeated runs (and runs with different worker counts) produce bit-identical
//! results. SplitMix64 is tiny, has no global state, and its output sequence
//! is fully determined by the seed.

/// Deterministic 64-bit generator (SplitMix64).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Creates a generator with the given seed.
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Returns the next 64-bit value.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Returns a uniform sample in `[0, 1)`, using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fills `out` with samples in `[-0.5, 0.5)`, a convenient zero-mean
    /// starting vector for iterative methods.
    pub fn fill_centered(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.next_f64() - 0.5;
        }
    }
}
