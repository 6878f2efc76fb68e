//! Shared fixtures for the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniform points in `[0,1]^p` with a smooth response.
pub fn toy_data(n: usize, p: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = rng(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.gen()).collect()).collect();
    let y = x.iter().map(|v| v.iter().enumerate().map(|(k, t)| ((k + 2) as f64 * t).sin()).sum()).collect();
    (x, y)
}

/// Uniform points spread over `[-h, h]^p`.
pub fn targets(count: usize, p: usize, h: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    (0..count).map(|_| (0..p).map(|_| rng.gen_range(-h..h)).collect()).collect()
}
