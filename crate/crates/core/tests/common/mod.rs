//! Naive reference implementations. Nothing here goes through the
//! fingerprint module or the stream's digit rule.

#![allow(dead_code)]

use std::collections::HashSet;

use apw_core::{FixedPointStream, Letter, Substitution};

pub fn parse(text: &str) -> Substitution {
    Substitution::parse_spec(text).unwrap()
}

pub fn stream(text: &str) -> FixedPointStream {
    FixedPointStream::first(parse(text)).unwrap()
}

/// Prefix of `σ^∞(seed)` by whole-word iteration.
pub fn naive_fixed_point(s: &Substitution, seed: u8, n: usize) -> Vec<u8> {
    let mut w = vec![seed];
    while w.len() < n {
        let mut next = Vec::with_capacity(w.len() * s.m());
        for &c in &w {
            next.extend_from_slice(s.image(Letter(c)));
        }
        w = next;
    }
    w.truncate(n);
    w
}

pub fn naive_is_anti_power(w: &[u8], k: usize, ell: usize) -> bool {
    for i in 0..k {
        for j in i + 1..k {
            if w[i * ell..(i + 1) * ell] == w[j * ell..(j + 1) * ell] {
                return false;
            }
        }
    }
    true
}

/// Ascent with a std `HashSet` of block slices.
pub fn naive_min_ell(x: &[u8], n: usize, k: usize, cap: usize) -> Option<usize> {
    (1..=cap).find(|&ell| {
        let blocks: HashSet<&[u8]> = (0..k).map(|j| &x[n + j * ell..n + (j + 1) * ell]).collect();
        blocks.len() == k
    })
}

/// Least `n ≤ bound` such that every `σ^n(a)` contains every letter, by
/// expanding the words themselves.
pub fn naive_primitive_witness(s: &Substitution, bound: usize) -> Option<usize> {
    let r = s.rank();
    let mut words: Vec<Vec<u8>> = (0..r as u8).map(|a| vec![a]).collect();
    for n in 1..=bound {
        for w in words.iter_mut() {
            let mut next = Vec::with_capacity(w.len() * s.m());
            for &c in w.iter() {
                next.extend_from_slice(s.image(Letter(c)));
            }
            *w = next;
        }
        let all = words
            .iter()
            .all(|w| (0..r as u8).all(|b| w.contains(&b)));
        if all {
            return Some(n);
        }
    }
    None
}

/// Least `L` with disjoint aligned and non-aligned length-`L` factor sets.
pub fn naive_recognizability(x: &[u8], m: usize, l_max: usize) -> Option<usize> {
    (1..=l_max).find(|&len| {
        let mut aligned = HashSet::new();
        let mut other = HashSet::new();
        for p in 0..=x.len() - len {
            if p % m == 0 {
                aligned.insert(&x[p..p + len]);
            } else {
                other.insert(&x[p..p + len]);
            }
        }
        aligned.is_disjoint(&other)
    })
}

pub fn positions(x: &[u8], factor: &[u8]) -> Vec<usize> {
    (0..=x.len() - factor.len())
        .filter(|&p| x[p..p + factor.len()] == *factor)
        .collect()
}

/// Smallest `M` such that every length-`M` window of `x` contains `factor`,
/// by sliding every candidate window.
pub fn naive_return_bound(x: &[u8], factor: &[u8]) -> usize {
    let occ = positions(x, factor);
    let len = factor.len();
    (len..=x.len())
        .find(|&m| {
            (0..=x.len() - m).all(|s| {
                let i = occ.partition_point(|&p| p < s);
                i < occ.len() && occ[i] + len <= s + m
            })
        })
        .unwrap()
}

/// Whether all occurrences of every length-`len` factor are congruent mod
/// `modulus`.
pub fn naive_congruent(x: &[u8], len: usize, modulus: usize) -> bool {
    let mut first: std::collections::HashMap<&[u8], usize> = std::collections::HashMap::new();
    for p in 0..=x.len() - len {
        let f = first.entry(&x[p..p + len]).or_insert(p);
        if (p - *f) % modulus != 0 {
            return false;
        }
    }
    true
}
