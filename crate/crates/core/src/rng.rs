//! Named random streams derived from a single seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for `(name, index)` under `seed`. Streams with
/// different names or indices never overlap.
pub fn named_stream(seed: u64, name: &str, index: u64) -> ChaCha8Rng {
    // FNV-1a of the name selects the stream family.
    let mut tag: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        tag ^= b as u64;
        tag = tag.wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    rng
}
