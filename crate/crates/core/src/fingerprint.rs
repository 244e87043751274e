//! Polynomial fingerprints of factors, modulo the Mersenne prime 2⁶¹ − 1.
//!
//! Fingerprints only ever prune comparisons: every equality they suggest is
//! confirmed against the underlying letters before it is reported.

use std::collections::HashMap;

const MOD: u64 = (1 << 61) - 1;
// fixed so that runs are reproducible
const BASE: u64 = 0x1f3a_5c7e_9b2d_4f61 % MOD;

#[inline]
fn mul(a: u64, b: u64) -> u64 {
    let t = a as u128 * b as u128;
    let t = (t >> 61) as u64 + (t as u64 & MOD);
    if t >= MOD {
        t - MOD
    } else {
        t
    }
}

#[inline]
fn add(a: u64, b: u64) -> u64 {
    let t = a + b;
    if t >= MOD {
        t - MOD
    } else {
        t
    }
}

/// Fingerprint of a whole slice.
pub fn fingerprint(text: &[u8]) -> u64 {
    text.iter()
        .fold(0, |h, &c| add(mul(h, BASE), c as u64 + 1))
}

/// Prefix fingerprints of a text, giving O(1) fingerprints of any factor.
pub struct PrefixHash<'a> {
    text: &'a [u8],
    prefix: Vec<u64>,
    pow: Vec<u64>,
}

impl<'a> PrefixHash<'a> {
    pub fn new(text: &'a [u8]) -> Self {
        let mut prefix = Vec::with_capacity(text.len() + 1);
        let mut pow = Vec::with_capacity(text.len() + 1);
        prefix.push(0);
        pow.push(1);
        for (i, &c) in text.iter().enumerate() {
            prefix.push(add(mul(prefix[i], BASE), c as u64 + 1));
            pow.push(mul(pow[i], BASE));
        }
        PrefixHash { text, prefix, pow }
    }

    pub fn text(&self) -> &'a [u8] {
        self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// Fingerprint of `text[start..start + len]`.
    #[inline]
    pub fn get(&self, start: usize, len: usize) -> u64 {
        let end = start + len;
        add(self.prefix[end], MOD - mul(self.prefix[start], self.pow[len]))
    }

    #[inline]
    pub fn factor(&self, start: usize, len: usize) -> &'a [u8] {
        &self.text[start..start + len]
    }
}

/// All positions of `text` grouped by the length-`len` factor starting there.
///
/// Classes are ordered by first occurrence and each class lists its
/// positions in ascending order. Grouping is exact.
pub fn factor_classes(text: &[u8], len: usize) -> Vec<Vec<usize>> {
    if len == 0 || len > text.len() {
        return Vec::new();
    }
    let hash = PrefixHash::new(text);
    factor_classes_with(&hash, len, text.len() - len + 1)
}

/// Like [`factor_classes`] for the starts `0..starts`, reusing prefix hashes.
pub fn factor_classes_with(hash: &PrefixHash<'_>, len: usize, starts: usize) -> Vec<Vec<usize>> {
    assert!(starts == 0 || starts - 1 + len <= hash.len());
    let mut classes: Vec<Vec<usize>> = Vec::new();
    // fingerprint -> class ids sharing it
    let mut by_hash: HashMap<u64, Vec<usize>> = HashMap::new();
    for p in 0..starts {
        let h = hash.get(p, len);
        let ids = by_hash.entry(h).or_default();
        let here = hash.factor(p, len);
        match ids
            .iter()
            .copied()
            .find(|&id| hash.factor(classes[id][0], len) == here)
        {
            Some(id) => classes[id].push(p),
            None => {
                ids.push(classes.len());
                classes.push(vec![p]);
            }
        }
    }
    classes
}

/// Returns the first pair `(i, j)`, `i < j`, of equal blocks among the `k`
/// consecutive blocks of length `ell` starting at `start`, or `None` when the
/// blocks are pairwise distinct.
pub fn first_equal_blocks(
    hash: &PrefixHash<'_>,
    start: usize,
    k: usize,
    ell: usize,
) -> Option<(usize, usize)> {
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::with_capacity(k);
    for j in 0..k {
        let pos = start + j * ell;
        let ids = seen.entry(hash.get(pos, ell)).or_default();
        let block = hash.factor(pos, ell);
        if let Some(&i) = ids
            .iter()
            .find(|&&i| hash.factor(start + i * ell, ell) == block)
        {
            return Some((i, j));
        }
        ids.push(j);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substring_fingerprints_match_direct() {
        let text: Vec<u8> = (0..200u32).map(|i| ((i * 7 + i / 3) % 3) as u8).collect();
        let h = PrefixHash::new(&text);
        for start in [0, 5, 17, 100] {
            for len in [0, 1, 9, 50] {
                assert_eq!(h.get(start, len), fingerprint(&text[start..start + len]));
            }
        }
    }

    #[test]
    fn classes_group_equal_factors() {
        let text = [0, 1, 1, 0, 1, 0, 0, 1];
        let classes = factor_classes(&text, 2);
        assert_eq!(classes, vec![vec![0, 3, 6], vec![1], vec![2, 4], vec![5]]);
        assert!(factor_classes(&text, 9).is_empty());
    }

    #[test]
    fn equal_blocks() {
        let text = [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1];
        let h = PrefixHash::new(&text);
        assert_eq!(first_equal_blocks(&h, 0, 3, 4), Some((1, 2)));
        assert_eq!(first_equal_blocks(&h, 0, 2, 2), None);
        assert_eq!(first_equal_blocks(&h, 0, 1, 12), None);
    }
}
