//! Stable per-item seed derivation.
//!
//! Every stochastic operation takes one global seed. Work items (stories,
//! split pools, challenge instances) get their own generator whose seed is a
//! SHA-256 digest of the global seed and a list of string keys, so results do
//! not depend on iteration order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Derives a 64-bit seed from `global` and `keys`.
///
/// Keys are length-prefixed before hashing, so `["ab", "c"]` and `["a", "bc"]`
/// yield different seeds.
pub fn derive_seed(global: u64, keys: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(global.to_le_bytes());
    for key in keys {
        hasher.update((key.len() as u64).to_le_bytes());
        hasher.update(key.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_for(global: u64, keys: &[&str]) -> Rng {
    Rng::seed_from_u64(derive_seed(global, keys))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
