//! Counter-based random numbers.
//!
//! Every random draw is a pure function of `(key, counter)`, so results do
//! not depend on evaluation order or thread scheduling. The generator is
//! SplitMix64 evaluated at an arbitrary position of its Weyl sequence:
//!
//! ```text
//! GOLDEN      = 0x9E3779B97F4A7C15
//! avalanche(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!               z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!               z ^ (z >> 31)
//! splitmix64(x) = avalanche(x + GOLDEN)
//! word(key, i)  = avalanche(key + (i + 1) * GOLDEN)      (all mod 2^64)
//! ```
//!
//! `word(key, i)` is exactly the `i`-th output of a SplitMix64 stream seeded
//! with `key`.

use core::f64::consts::PI;

pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub const fn avalanche(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub const fn splitmix64(x: u64) -> u64 {
    avalanche(x.wrapping_add(GOLDEN))
}

/// Seed of trial `rep` at sweep point `point`:
/// `splitmix64(splitmix64(splitmix64(master) ^ point) ^ rep)`.
pub const fn mix_seed(master: u64, point: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ point) ^ rep)
}

/// Independent sub-stream for a named purpose: `splitmix64(seed ^ tag)`.
pub const fn derive(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ tag)
}

/// Random access view of one SplitMix64 stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub const fn new(key: u64) -> Self {
        Self { key }
    }

    #[inline]
    pub fn word(&self, i: u64) -> u64 {
        avalanche(
            self.key
                .wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN)),
        )
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&self, i: u64) -> f64 {
        (self.word(i) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw `i`, from words `2i` and `2i+1` (Box-Muller, cosine branch).
    #[inline]
    pub fn normal(&self, i: u64) -> f64 {
        let w = i.wrapping_mul(2);
        // (0, 1] keeps the logarithm finite
        let u1 = ((self.word(w) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.uniform(w.wrapping_add(1));
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2)
    }
}
