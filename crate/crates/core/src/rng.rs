//! Deterministic named random substreams derived from one user seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[inline]
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Mixes a seed with a sequence of integer labels into a new 64-bit seed.
pub fn derive_seed(seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(seed), |acc, &l| splitmix64(acc ^ splitmix64(l)))
}

/// RNG for the substream `name` of `seed`.
pub fn substream(seed: u64, name: &str) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, &[fnv1a(name.as_bytes())]))
}

/// RNG for the substream `name` of `seed`, further split by integer labels.
pub fn substream_with(seed: u64, name: &str, labels: &[u64]) -> StreamRng {
    let mut all = Vec::with_capacity(labels.len() + 1);
    all.push(fnv1a(name.as_bytes()));
    all.extend_from_slice(labels);
    StreamRng::seed_from_u64(derive_seed(seed, &all))
}
