//! Deterministic per-utterance random streams.
//!
//! Every utterance gets its own ChaCha20 stream whose key is the SHA-256 of
//! the master seed and the utterance key. Streams are therefore independent
//! of worker scheduling, and the stream position (in 32-bit words) can be
//! recorded and restored to replay any suffix of the draws.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

const DOMAIN: &[u8] = b"rawboost/utterance-rng/v1";

#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha20Rng,
    master_seed: u64,
    key: Vec<u8>,
}

/// Derives the random stream for one utterance from the batch master seed.
pub fn derive_utterance_rng(master_seed: u64, utterance_key: &[u8]) -> RandomSource {
    let mut hasher = Sha256::new();
    hasher.update(DOMAIN);
    hasher.update(master_seed.to_le_bytes());
    hasher.update((utterance_key.len() as u64).to_le_bytes());
    hasher.update(utterance_key);
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&hasher.finalize());
    RandomSource {
        rng: ChaCha20Rng::from_seed(seed),
        master_seed,
        key: utterance_key.to_vec(),
    }
}

impl RandomSource {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    /// Uniform real on `[a, b]`. Returns `a` exactly when `a == b`.
    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        let u: f64 = self.rng.random();
        a + (b - a) * u
    }

    /// Uniform real on the half-open interval `(0, 1]`.
    pub fn uniform_open_closed(&mut self) -> f64 {
        let u: f64 = self.rng.random();
        1.0 - u
    }

    /// Uniform integer on the closed interval `[a, b]`.
    pub fn uniform_int(&mut self, a: usize, b: usize) -> usize {
        self.rng.random_range(a..=b)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// +1.0 or -1.0 with equal probability.
    pub fn fair_sign(&mut self) -> f64 {
        if self.rng.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    /// Number of 32-bit words consumed so far.
    pub fn word_pos(&self) -> u64 {
        self.rng.get_word_pos() as u64
    }

    /// Repositions the stream, as if exactly `pos` words had been consumed.
    pub fn seek(&mut self, pos: u64) {
        self.rng.set_word_pos(pos as u128);
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
