//! Counter-based deterministic random streams.
//!
//! Every noise field in the attribution loop is drawn from a [`StreamRng`]
//! keyed on `(seed, iteration, variant, channel, field)`. Streams are
//! independent of one another and of evaluation order, so concurrent variant
//! generation cannot change results.

use core::f64::consts::TAU;

use libm::{cos, log, sin, sqrt};

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic stream generator (splitmix64 over a mixed key).
#[derive(Debug, Clone)]
pub struct StreamRng {
    state: u64,
    spare_gaussian: Option<f64>,
}

impl StreamRng {
    /// Derive an independent stream from a seed and a list of key words.
    pub fn from_key(seed: u64, words: &[u64]) -> Self {
        let mut state = mix64(seed ^ 0x9E3779B97F4A7C15);
        for &w in words {
            state = mix64(state.wrapping_add(0x9E3779B97F4A7C15) ^ mix64(w));
        }
        StreamRng { state, spare_gaussian: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        mix64(self.state)
    }

    /// Uniform in the half-open interval (0, 1].
    pub fn next_unit_open(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [0, 1).
    pub fn next_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64) * (1.0 / 9007199254740992.0)
    }

    /// Uniform integer in [0, n). `n` must be nonzero.
    pub fn next_below(&mut self, n: usize) -> usize {
        // Desk-scale ranges; modulo bias is negligible at n << 2^64.
        (self.next_u64() % n as u64) as usize
    }

    /// Standard normal draw (Box-Muller, caching the second value).
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(g) = self.spare_gaussian.take() {
            return g;
        }
        let u1 = self.next_unit_open();
        let u2 = self.next_unit();
        let r = sqrt(-2.0 * log(u1));
        let theta = TAU * u2;
        self.spare_gaussian = Some(r * sin(theta));
        r * cos(theta)
    }

    /// Fill a fresh buffer with `len` draws of `mean + std * N(0,1)`.
    pub fn gaussian_field(&mut self, len: usize, mean: f64, std: f64) -> alloc::vec::Vec<f64> {
        (0..len).map(|_| mean + std * self.next_gaussian()).collect()
    }
}
