//! Labeled random substreams derived from one root seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Stream for `(root, labels...)`. Distinct label paths give independent
/// streams, so work can be reordered without perturbing results.
pub fn substream(root: u64, labels: &[&str]) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(root.to_le_bytes());
    for l in labels {
        h.update((l.len() as u64).to_le_bytes());
        h.update(l.as_bytes());
    }
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// In-place Fisher–Yates: for i from the end, swap with `gen_range(0..=i)`.
pub fn shuffle<T, R: Rng>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}
