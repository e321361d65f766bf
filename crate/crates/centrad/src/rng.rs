//! Seeded randomness with a pinned, portable generator.
//!
//! All stochastic components draw from [`ChaCha8Rng`] (ChaCha with 8 rounds,
//! as published by the `rand_chacha` crate), seeded through
//! [`SeedableRng::seed_from_u64`]. Gaussian samples use the Box-Muller
//! transform (cosine branch, one sample per uniform pair) rather than a
//! library sampler so that streams stay reproducible across platforms and
//! dependency upgrades.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Build the project-wide RNG from a bare seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a component seed from a global seed and a label.
///
/// Labels keep independent pipeline stages (generation, splitting, training,
/// search) on separate streams while everything still flows from one global
/// seed. FNV-1a folds the label, splitmix64 mixes it with the global seed.
pub fn derive_seed(global: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(global ^ h)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// One standard-normal sample via Box-Muller (cosine branch).
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // u1 in (0, 1]: guards ln(0)
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// A normal sample with the given mean and standard deviation.
pub fn normal(rng: &mut ChaCha8Rng, mean: f64, std_dev: f64) -> f64 {
    mean + std_dev * standard_normal(rng)
}

/// In-place Fisher-Yates shuffle driven by the pinned generator.
pub fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
