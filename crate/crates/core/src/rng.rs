//! Seeded randomness. Every random draw in the crate goes through
//! SplitMix64 so runs are reproducible from a single `u64`.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

pub type SeededRng = rand_xoshiro::SplitMix64;

pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Independent stream for a `(seed, purpose)` pair.
pub fn stream(seed: u64, purpose: u64) -> SeededRng {
    seeded(seed ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn uniform_vec(rng: &mut impl Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
}

pub fn gaussian_vec(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

/// `d` values log-uniform in `[lo, hi]`.
pub fn log_uniform_vec(rng: &mut impl Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..d).map(|_| (a + (b - a) * rng.random::<f64>()).exp()).collect()
}
