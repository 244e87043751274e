//! The fixed point `x = σ^∞(a)` of a uniform substitution.
//!
//! The prefix cache grows by the digit rule `x[q·m + d] = σ(x[q])[d]`, so it is
//! always an exact prefix of `x`; single letters can be read without the cache
//! by running the same rule over the base-`m` digits of the position.

use rayon::prelude::*;
use thiserror::Error;

use crate::fingerprint::{factor_classes, factor_classes_with, PrefixHash};
use crate::substitution::{Letter, Substitution, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixedPointError {
    #[error("image length m={0} does not grow a fixed point (need m >= 2)")]
    NonGrowing(usize),
    #[error("letter {0:?} is not a fixed-point seed")]
    NotASeed(String),
    #[error("factor at position {position} occurs only once in a window of {window}; recurrence bound unreliable")]
    NotRecurrentInWindow { position: usize, window: usize },
}

#[derive(Debug, Clone)]
pub struct FixedPointStream {
    substitution: Substitution,
    seed: Letter,
    cache: Vec<u8>,
}

impl FixedPointStream {
    pub fn new(substitution: Substitution, seed: Letter) -> Result<Self, FixedPointError> {
        if substitution.m() < 2 {
            return Err(FixedPointError::NonGrowing(substitution.m()));
        }
        if !substitution.fixed_point_seeds().contains(&seed) {
            return Err(FixedPointError::NotASeed(
                substitution.alphabet().symbol(seed).to_string(),
            ));
        }
        Ok(FixedPointStream {
            substitution,
            seed,
            cache: vec![seed.0],
        })
    }

    /// Stream for the first fixed-point seed of `substitution`.
    pub fn first(substitution: Substitution) -> Result<Self, FixedPointError> {
        let seed = substitution
            .fixed_point_seeds()
            .first()
            .copied()
            .ok_or_else(|| FixedPointError::NotASeed("<none>".into()))?;
        FixedPointStream::new(substitution, seed)
    }

    pub fn substitution(&self) -> &Substitution {
        &self.substitution
    }

    pub fn seed(&self) -> Letter {
        self.seed
    }

    pub fn m(&self) -> usize {
        self.substitution.m()
    }

    pub fn materialized(&self) -> usize {
        self.cache.len()
    }

    /// Makes sure at least `n` letters are cached and returns them.
    pub fn ensure(&mut self, n: usize) -> &[u8] {
        let m = self.m();
        if self.cache.len() < n {
            self.cache.reserve(n - self.cache.len());
            for i in self.cache.len()..n {
                let parent = Letter(self.cache[i / m]);
                let c = self.substitution.image(parent)[i % m];
                self.cache.push(c);
            }
        }
        &self.cache[..n]
    }

    /// The length-`n` prefix of the fixed point.
    pub fn prefix(&mut self, n: usize) -> Word {
        Word::from(self.ensure(n))
    }

    /// `x_i` via base-`m` digit recursion, without touching the cache.
    pub fn letter_at(&self, i: u64) -> Letter {
        let m = self.m() as u64;
        let mut digits = Vec::with_capacity(64);
        let mut q = i;
        while q > 0 {
            digits.push((q % m) as usize);
            q /= m;
        }
        let mut letter = self.seed;
        for &d in digits.iter().rev() {
            letter = Letter(self.substitution.image(letter)[d]);
        }
        letter
    }

    /// All occurrences of `factor` starting at `p ≤ window − |factor|`.
    pub fn occurrences(&mut self, factor: &[u8], window: usize) -> OccurrenceList {
        let text = self.ensure(window);
        OccurrenceList {
            factor: Word::from(factor),
            positions: find_all(text, factor),
            window,
        }
    }

    /// Number of distinct length-`len` factors in the length-`window` prefix.
    pub fn factor_complexity(&mut self, len: usize, window: usize) -> usize {
        factor_classes(self.ensure(window), len).len()
    }

    /// Morse–Hedlund test over `1..=n_max`: a length `n` with at most `n`
    /// distinct factors proves eventual periodicity.
    ///
    /// A window of length `w` holds at most `w − n + 1` factors of length `n`,
    /// so only `n ≤ w / 2` can be tested; the verdict reports the depth
    /// actually reached.
    pub fn aperiodicity_check(&mut self, n_max: usize, window: usize) -> Aperiodicity {
        let depth = n_max.min(window / 2);
        let text = self.ensure(window);
        let hash = PrefixHash::new(text);
        let detected = (1..=depth)
            .into_par_iter()
            .find_first(|&n| factor_classes_with(&hash, n, window - n + 1).len() <= n);
        match detected {
            Some(n) => Aperiodicity::PeriodicDetected(n),
            None => Aperiodicity::AperiodicUpTo(depth),
        }
    }

    /// Smallest `R` such that every length-`R` window of the prefix contains
    /// every length-`len` factor seen in it. The `growing` flag compares with
    /// the bound over half the window.
    pub fn recurrence_bound(
        &mut self,
        len: usize,
        window: usize,
    ) -> Result<RecurrenceBound, FixedPointError> {
        let text = self.ensure(window);
        let bound = all_factor_bound(text, len)?;
        let half = window / 2;
        let growing = if half > len {
            match all_factor_bound(&text[..half], len) {
                Ok(b) => bound > b,
                Err(_) => true,
            }
        } else {
            true
        };
        Ok(RecurrenceBound {
            bound,
            growing,
            window,
        })
    }

    /// Smallest `M` such that every length-`M` window of the prefix contains
    /// `factor`.
    pub fn return_bound(&mut self, factor: &[u8], window: usize) -> Result<usize, FixedPointError> {
        let occ = self.occurrences(factor, window);
        gap_bound(&occ.positions, factor.len(), window).ok_or(
            FixedPointError::NotRecurrentInWindow {
                position: occ.positions.first().copied().unwrap_or(0),
                window,
            },
        )
    }
}

fn find_all(text: &[u8], factor: &[u8]) -> Vec<usize> {
    if factor.is_empty() || factor.len() > text.len() {
        return Vec::new();
    }
    let first = factor[0];
    (0..=text.len() - factor.len())
        .filter(|&p| text[p] == first && &text[p..p + factor.len()] == factor)
        .collect()
}

/// Smallest window length guaranteed to contain one of the occurrences
/// `positions` of a length-`len` factor in a text of length `window`.
/// `None` when the factor occurs fewer than twice.
pub(crate) fn gap_bound(positions: &[usize], len: usize, window: usize) -> Option<usize> {
    if positions.len() < 2 {
        return None;
    }
    let lead = positions[0] + len;
    let tail = window - positions[positions.len() - 1];
    let inner = positions
        .windows(2)
        .map(|w| w[1] - w[0] + len - 1)
        .max()
        .unwrap_or(0);
    Some(lead.max(tail).max(inner))
}

fn all_factor_bound(text: &[u8], len: usize) -> Result<usize, FixedPointError> {
    let classes = factor_classes(text, len);
    let mut bound = 0;
    for class in &classes {
        let b = gap_bound(class, len, text.len()).ok_or(FixedPointError::NotRecurrentInWindow {
            position: class[0],
            window: text.len(),
        })?;
        bound = bound.max(b);
    }
    Ok(bound)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceList {
    pub factor: Word,
    pub positions: Vec<usize>,
    pub window: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aperiodicity {
    PeriodicDetected(usize),
    AperiodicUpTo(usize),
}

impl Aperiodicity {
    pub fn is_periodic(&self) -> bool {
        matches!(self, Aperiodicity::PeriodicDetected(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecurrenceBound {
    pub bound: usize,
    /// The bound still grew between half the window and the full window.
    pub growing: bool,
    pub window: usize,
}
