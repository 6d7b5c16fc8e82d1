//! Seeded random streams.
//!
//! Every random quantity in the crate comes from a SplitMix64 generator
//! (`rand_xoshiro::SplitMix64`, 64-bit state, Steele/Lea/Flood 2014). A
//! stream is identified by the user seed and a purpose tag; its initial
//! state is `seed + tag · 0x9E3779B97F4A7C15 (mod 2^64)`, so streams for
//! different purposes never share a prefix for the same seed. Normal
//! variates use the ziggurat sampler from `rand_distr::StandardNormal`.
//! Both algorithms are integer-exact, so a given `(seed, tag)` reproduces
//! the same numbers on every platform.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Purpose tags for [`stream`].
pub mod tag {
    pub const SPD_MATRIX: u64 = 1;
    pub const CROSS_LEFT: u64 = 2;
    pub const CROSS_RIGHT: u64 = 3;
    pub const INIT: u64 = 4;
    pub const SAMPLES: u64 = 5;
    pub const NOISE: u64 = 6;
    pub const DERIVCHECK: u64 = 7;
    pub const DIRECTIONS: u64 = 8;
}

pub type Stream = SplitMix64;

pub fn stream(seed: u64, tag: u64) -> Stream {
    SplitMix64::seed_from_u64(seed.wrapping_add(tag.wrapping_mul(GOLDEN_GAMMA)))
}

pub fn normal(rng: &mut Stream) -> f64 {
    rng.sample(StandardNormal)
}

pub fn normal_vec(rng: &mut Stream, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

/// Uniform in `[lo, hi)`.
pub fn uniform(rng: &mut Stream, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_seed_and_tag_reproduce() {
        let a = normal_vec(&mut stream(42, tag::SAMPLES), 16);
        let b = normal_vec(&mut stream(42, tag::SAMPLES), 16);
        assert_eq!(a, b);
        let c = normal_vec(&mut stream(42, tag::INIT), 16);
        assert_ne!(a, c);
    }

    #[test]
    fn first_outputs_are_pinned() {
        // SplitMix64 reference output for state 0 (tag 0, seed 0).
        let mut r = stream(0, 0);
        assert_eq!(r.random::<u64>(), 0xE220_A839_7B1D_CDAF);
    }
}
