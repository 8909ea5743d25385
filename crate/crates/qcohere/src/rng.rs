//! Seeded random streams.
//!
//! Every sampler takes an explicit 64-bit seed. The generator is ChaCha20 keyed with the
//! seed as eight little-endian bytes followed by 24 zero bytes, stream 0, so the sequence
//! can be reproduced by any ChaCha20 implementation. Normal variates use the ziggurat
//! method of `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub type QRng = ChaCha20Rng;

pub fn rng(seed: u64) -> QRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    ChaCha20Rng::from_seed(key)
}

/// Independent child stream; used to give each parallel task its own generator.
pub fn substream(seed: u64, index: u64) -> QRng {
    let mut g = rng(seed);
    g.set_stream(index.wrapping_add(1));
    g
}

pub fn normal(g: &mut QRng) -> f64 {
    g.sample(StandardNormal)
}

pub fn uniform(g: &mut QRng) -> f64 {
    g.random::<f64>()
}

/// Uniform point on the probability simplex (Dirichlet(1,…,1)).
pub fn dirichlet(g: &mut QRng, d: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..d).map(|_| -(1.0 - uniform(g)).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}
