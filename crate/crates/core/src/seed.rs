//! Deterministic seed derivation.
//!
//! Every random stream in the crate is obtained from a single master seed and
//! a *path* of labelled indices, e.g. `[("n", 2), ("outer", 17)]`. The derived
//! seed is the first eight bytes (little-endian) of
//! `SHA-256(master_le ‖ for each step: len(label)_le ‖ label ‖ index_le)`.
//! The encoding is length-prefixed, so distinct paths never share a preimage,
//! and it is independent of platform endianness and of the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Generator used throughout the crate.
pub type LabRng = ChaCha8Rng;

/// Derive a 64-bit seed from `master` and a labelled index path.
pub fn derive_seed(master: u64, path: &[(&str, u64)]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for (label, index) in path {
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        hasher.update(index.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}

/// A generator seeded from [`derive_seed`].
pub fn rng_at(master: u64, path: &[(&str, u64)]) -> LabRng {
    LabRng::seed_from_u64(derive_seed(master, path))
}

/// Fresh seed pulled from an existing generator, for APIs that take a `&mut` rng
/// but need to fan out into independent sub-streams.
pub fn fork_seed<R: rand::Rng + ?Sized>(rng: &mut R) -> u64 {
    rng.random()
}
