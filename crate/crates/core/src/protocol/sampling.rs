//! Seeded categorical sampling from a pattern distribution.
//!
//! Draw `i` of stream `s` under seed `x` always reads the same 64 bits of
//! the ChaCha8 keystream `(x, s)`, at word position `2i`. Chunks of draws can
//! therefore run on any number of workers and reproduce the serial sequence.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{OutcomePattern, PatternDistribution};

const CHUNK: u64 = 1 << 15;

fn uniform(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

struct Cdf {
    cumulative: Vec<f64>,
}

impl Cdf {
    fn new(dist: &PatternDistribution) -> Self {
        let mut acc = 0.0;
        let cumulative = dist
            .iter()
            .map(|(_, p)| {
                acc += p;
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn index(&self, u: f64) -> usize {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let target = u * total;
        self.cumulative
            .partition_point(|&c| c <= target)
            .min(self.cumulative.len().saturating_sub(1))
    }
}

fn chunk_indices(cdf: &Cdf, seed: u64, stream: u64, start: u64, len: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * start as u128);
    (0..len).map(|_| cdf.index(uniform(rng.next_u64()))).collect()
}

/// Indices into `dist.iter()` order for `n` draws.
pub(crate) fn sample_indices(dist: &PatternDistribution, n: u64, seed: u64, stream: u64) -> Vec<usize> {
    let cdf = Cdf::new(dist);
    let chunks: Vec<u64> = (0..n.div_ceil(CHUNK)).collect();
    chunks
        .par_iter()
        .map(|&c| {
            let start = c * CHUNK;
            chunk_indices(&cdf, seed, stream, start, CHUNK.min(n - start))
        })
        .collect::<Vec<_>>()
        .concat()
}

/// `n` i.i.d. draws on a given stream of the seeded generator.
pub fn sample_patterns_on_stream(dist: &PatternDistribution, n: u64, seed: u64, stream: u64) -> Vec<OutcomePattern> {
    let patterns: Vec<&OutcomePattern> = dist.iter().map(|(s, _)| s).collect();
    sample_indices(dist, n, seed, stream)
        .into_iter()
        .map(|i| patterns[i].clone())
        .collect()
}

/// `n` i.i.d. draws from `dist`, deterministic in `seed`.
pub fn sample_patterns(dist: &PatternDistribution, n: u64, seed: u64) -> Vec<OutcomePattern> {
    sample_patterns_on_stream(dist, n, seed, 0)
}
