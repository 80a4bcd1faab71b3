//! Seed derivation and deterministic block-parallel execution.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by
//! `(seed, domain)` and selected by a stream index. Work is cut into blocks of
//! fixed size whose index picks the stream, so the numbers produced do not
//! depend on how rayon schedules the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::ops::Range;

/// Default number of Monte Carlo samples per block.
pub const BLOCK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a hash used to turn a domain label into a stream key.
pub const fn domain(label: &str) -> u64 {
    let bytes = label.as_bytes();
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut i = 0;
    while i < bytes.len() {
        hash ^= bytes[i] as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
        i += 1;
    }
    hash
}

impl Seed {
    /// A child seed, independent of the parent for every distinct tag.
    pub fn derive(self, tag: u64) -> Seed {
        Seed(splitmix(splitmix(self.0) ^ splitmix(tag.wrapping_add(0x632B_E59B_D9B4_E019))))
    }

    pub fn stream(self, domain: u64, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut state = splitmix(self.0 ^ splitmix(domain));
        for chunk in key.chunks_mut(8) {
            state = splitmix(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }
}

pub fn blocks(n: usize, block: usize) -> Vec<Range<usize>> {
    assert!(block > 0);
    (0..n.div_ceil(block))
        .map(|b| b * block..((b + 1) * block).min(n))
        .collect()
}

/// Runs `f(block_index, range)` over fixed blocks of `0..n`, in parallel,
/// returning results in block order.
pub fn map_blocks<T, F>(n: usize, block: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, Range<usize>) -> T + Sync,
{
    blocks(n, block)
        .into_par_iter()
        .enumerate()
        .map(|(b, r)| f(b, r))
        .collect()
}

/// Pairwise tree reduction with a fixed shape for a given length.
pub fn pairwise_reduce<T: Clone>(mut items: Vec<T>, merge: impl Fn(&T, &T) -> T) -> Option<T> {
    if items.is_empty() {
        return None;
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.chunks(2);
        for pair in &mut it {
            if pair.len() == 2 {
                next.push(merge(&pair[0], &pair[1]));
            } else {
                next.push(pair[0].clone());
            }
        }
        items = next;
    }
    items.pop()
}
