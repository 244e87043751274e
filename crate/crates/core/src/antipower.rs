//! k-anti-powers: k consecutive equal-length blocks that are pairwise distinct.

use rayon::prelude::*;
use thiserror::Error;

use crate::fingerprint::{first_equal_blocks, PrefixHash};
use crate::fixedpoint::FixedPointStream;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AntiPowerError {
    #[error("word of length {len} is shorter than k·ell = {needed}")]
    InsufficientLength { len: usize, needed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AntiPowerQuery {
    pub n: usize,
    pub k: usize,
    pub ell_max: usize,
}

impl AntiPowerQuery {
    pub fn new(n: usize, k: usize, ell_max: usize) -> Self {
        assert!(k >= 1 && ell_max >= 1, "k and ell_max must be positive");
        AntiPowerQuery { n, k, ell_max }
    }

    /// Letters needed past position 0 to answer the query.
    pub fn span(&self) -> usize {
        self.n + self.k * self.ell_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiPowerResult {
    pub query: AntiPowerQuery,
    pub min_ell: Option<usize>,
}

impl AntiPowerResult {
    pub fn ratio(&self) -> Option<f64> {
        self.min_ell.map(|ell| ell as f64 / self.query.k as f64)
    }
}

/// Whether the first `k` blocks of length `ell` of `word` are pairwise
/// distinct. `k = 1` is vacuously an anti-power.
pub fn is_anti_power(word: &[u8], k: usize, ell: usize) -> Result<bool, AntiPowerError> {
    let needed = k * ell;
    if word.len() < needed {
        return Err(AntiPowerError::InsufficientLength {
            len: word.len(),
            needed,
        });
    }
    let hash = PrefixHash::new(&word[..needed]);
    Ok(first_equal_blocks(&hash, 0, k, ell).is_none())
}

/// Minimal-block-length search over a text with precomputed fingerprints.
pub fn min_block_length_in(hash: &PrefixHash<'_>, query: AntiPowerQuery) -> Option<usize> {
    assert!(query.span() <= hash.len(), "text too short for query");
    // existence at ell does not imply existence at ell + 1, so ascend fully
    (1..=query.ell_max).find(|&ell| first_equal_blocks(hash, query.n, query.k, ell).is_none())
}

/// Smallest `ell ≤ ell_max` such that `x[n .. n + k·ell]` is a k-anti-power.
pub fn min_block_length(stream: &mut FixedPointStream, query: AntiPowerQuery) -> AntiPowerResult {
    let text = stream.ensure(query.span());
    let hash = PrefixHash::new(text);
    AntiPowerResult {
        query,
        min_ell: min_block_length_in(&hash, query),
    }
}

/// Evaluates every `(n, k)` of the grid, rows in n-major then k order.
///
/// Cells run on the current rayon pool; the row order does not depend on it.
pub fn scan(
    stream: &mut FixedPointStream,
    ns: &[usize],
    ks: &[usize],
    ell_max: usize,
) -> Vec<AntiPowerResult> {
    scan_with(stream, ns, ks, |_| ell_max)
}

/// Like [`scan`] with a per-`k` search cap.
pub fn scan_with(
    stream: &mut FixedPointStream,
    ns: &[usize],
    ks: &[usize],
    ell_max: impl Fn(usize) -> usize + Sync,
) -> Vec<AntiPowerResult> {
    let queries: Vec<AntiPowerQuery> = ns
        .iter()
        .flat_map(|&n| ks.iter().map(move |&k| (n, k)))
        .map(|(n, k)| AntiPowerQuery::new(n, k, ell_max(k)))
        .collect();
    let span = queries.iter().map(AntiPowerQuery::span).max().unwrap_or(0);
    let text = stream.ensure(span);
    let hash = PrefixHash::new(text);
    queries
        .par_iter()
        .map(|&query| AntiPowerResult {
            query,
            min_ell: min_block_length_in(&hash, query),
        })
        .collect()
}
