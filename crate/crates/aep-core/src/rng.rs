//! Seeded RNG streams.
//!
//! All randomness flows from one root seed; independent parts of a run
//! (initial sampling, dynamics, quadrature, replicas) draw from named
//! substreams so each can be reproduced in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Derives a 32-byte seed from the root seed and a stream label (FNV-1a).
fn derive(root: u64, label: &str, index: u64) -> [u8; 32] {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut absorb = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    absorb(&root.to_le_bytes());
    absorb(label.as_bytes());
    absorb(&index.to_le_bytes());
    let mut seed = [0u8; 32];
    for (i, chunk) in seed.chunks_mut(8).enumerate() {
        h ^= (i as u64).wrapping_add(0x9e3779b97f4a7c15);
        h = h.wrapping_mul(0x100000001b3);
        // xorshift finalization so consecutive chunks decorrelate
        let mut v = h;
        v ^= v >> 33;
        v = v.wrapping_mul(0xff51afd7ed558ccd);
        v ^= v >> 33;
        chunk.copy_from_slice(&v.to_le_bytes());
    }
    seed
}

/// A named substream of the root seed.
pub fn substream(root: u64, label: &str) -> ChaCha12Rng {
    ChaCha12Rng::from_seed(derive(root, label, 0))
}

/// A named, indexed substream (e.g. one per replica).
pub fn substream_indexed(root: u64, label: &str, index: u64) -> ChaCha12Rng {
    ChaCha12Rng::from_seed(derive(root, label, index))
}
