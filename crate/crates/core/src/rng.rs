//! Deterministic random substreams.
//!
//! Every stochastic component draws from a ChaCha8 stream keyed by
//! `(master_seed, tag)` and selected by an index (a copy index, an instance
//! index, a repetition index). Streams are independent of scheduling, so a
//! parallel run reproduces a sequential one bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Tags for the components that own a substream family.
pub mod tags {
    pub const INPUT: &str = "input";
    pub const COPY: &str = "copy";
    pub const REPETITION: &str = "repetition";
    pub const SUITE: &str = "suite";
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325_u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// A family of independent streams sharing one key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Substreams {
    key: [u8; 32],
}

impl Substreams {
    pub fn new(master_seed: u64, tag: &str) -> Self {
        let mut state = master_seed ^ fnv1a(tag.as_bytes()).rotate_left(17);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self { key }
    }

    /// Stream number `index` of this family.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}

/// Derive a child seed, e.g. the master seed of one repetition.
pub fn derive_seed(master_seed: u64, tag: &str, index: u64) -> u64 {
    let mut state = master_seed ^ fnv1a(tag.as_bytes());
    let a = splitmix64(&mut state);
    let mut state = a ^ index.wrapping_mul(GOLDEN);
    splitmix64(&mut state)
}
