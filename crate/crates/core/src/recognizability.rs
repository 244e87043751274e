//! In-window estimates of the recognizability constants of a primitive
//! uniform substitution, and the derived constant `N' = 2M`.
//!
//! Every estimate is relative to the prefix window it was computed on. The
//! factor census behind an estimate is complete only when every factor of the
//! relevant length already occurs in the window; the estimators check this
//! with [`FixedPointStream::recurrence_bound`] and refuse to answer otherwise.
//!
//! Only factors of the fixed point `x` are scanned. For a primitive
//! substitution every point of the subshift has the factor set of `x`.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::fingerprint::{factor_classes_with, PrefixHash};
use crate::fixedpoint::{Aperiodicity, FixedPointError, FixedPointStream};
use crate::substitution::Word;

/// Default resource cap on windows and derived word lengths, in letters.
pub const DEFAULT_MAX_SYMBOLS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecognizabilityError {
    #[error("not primitive")]
    NotPrimitive,
    #[error("periodic input (at most {0} factors of length {0})")]
    PeriodicInput(usize),
    #[error("no constant found up to {0}")]
    NoConstantFound(usize),
    #[error("constant too large: {what} = {value} exceeds cap {cap}")]
    ConstantTooLarge {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error("window {window} too small for an exact census (need {needed})")]
    InsufficientWindow { needed: usize, window: usize },
    #[error(transparent)]
    FixedPoint(#[from] FixedPointError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecognizabilityConfig {
    /// Largest factor length tried for `N`.
    pub factor_len_max: usize,
    /// Largest exponent tried for `N1`.
    pub desub_max: usize,
    /// Depth of the aperiodicity gate.
    pub aperiodicity_depth: usize,
    pub max_symbols: usize,
}

impl Default for RecognizabilityConfig {
    fn default() -> Self {
        RecognizabilityConfig {
            factor_len_max: 16,
            desub_max: 8,
            aperiodicity_depth: 64,
            max_symbols: DEFAULT_MAX_SYMBOLS,
        }
    }
}

/// A factor seen both at an `m`-aligned and at a non-aligned position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentConflict {
    pub factor: Word,
    pub aligned: usize,
    pub unaligned: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecognizabilityEstimate {
    pub n: usize,
    /// Conflict at length `n − 1`, absent when `n = 1`.
    pub counterexample: Option<AlignmentConflict>,
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecognizabilityReport {
    pub n: usize,
    pub n1: usize,
    pub r: usize,
    pub p: Word,
    pub m_bound: usize,
    pub n_prime: usize,
    pub window: usize,
    pub counterexample: Option<AlignmentConflict>,
}

impl RecognizabilityReport {
    /// Exponent `N1 + r` of the prefix `p = σ^(N1+r)(a)`.
    pub fn p_exponent(&self) -> usize {
        self.n1 + self.r
    }
}

impl fmt::Display for RecognizabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N={}", self.n)?;
        writeln!(f, "N1={}", self.n1)?;
        writeln!(f, "r={}", self.r)?;
        writeln!(f, "p_len={}", self.p.len())?;
        writeln!(f, "M={}", self.m_bound)?;
        writeln!(f, "N_prime={}", self.n_prime)?;
        writeln!(f, "window={}", self.window)
    }
}

/// Two occurrences of one factor at positions incongruent modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PowerVerdict {
    Holds,
    Counterexample {
        len: usize,
        modulus: usize,
        alpha: usize,
        beta: usize,
    },
}

impl PowerVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PowerVerdict::Holds)
    }
}

/// Primitivity and aperiodicity gates shared by every estimator.
pub fn check_gates(
    stream: &mut FixedPointStream,
    depth: usize,
    window: usize,
) -> Result<(), RecognizabilityError> {
    if !stream.substitution().is_primitive().is_primitive() {
        return Err(RecognizabilityError::NotPrimitive);
    }
    match stream.aperiodicity_check(depth, window) {
        Aperiodicity::PeriodicDetected(n) => Err(RecognizabilityError::PeriodicInput(n)),
        Aperiodicity::AperiodicUpTo(_) => Ok(()),
    }
}

fn check_window(window: usize, cap: usize) -> Result<(), RecognizabilityError> {
    if window > cap {
        return Err(RecognizabilityError::ConstantTooLarge {
            what: "window",
            value: window,
            cap,
        });
    }
    Ok(())
}

/// Fails unless every factor of length `len` is guaranteed to appear in the
/// window, i.e. `window ≥ R(len) + slack`.
fn require_census(
    stream: &mut FixedPointStream,
    len: usize,
    slack: usize,
    window: usize,
) -> Result<(), RecognizabilityError> {
    let rb = stream
        .recurrence_bound(len, window)
        .map_err(|_| RecognizabilityError::InsufficientWindow {
            needed: window.saturating_mul(2),
            window,
        })?;
    let needed = rb.bound + slack;
    if window < needed {
        return Err(RecognizabilityError::InsufficientWindow { needed, window });
    }
    Ok(())
}

fn alignment_conflict(hash: &PrefixHash<'_>, len: usize, m: usize) -> Option<AlignmentConflict> {
    let starts = hash.len() - len + 1;
    factor_classes_with(hash, len, starts)
        .into_iter()
        .find_map(|class| {
            let aligned = class.iter().copied().find(|p| p % m == 0)?;
            let unaligned = class.iter().copied().find(|p| p % m != 0)?;
            Some(AlignmentConflict {
                factor: Word::from(hash.factor(class[0], len)),
                aligned,
                unaligned,
            })
        })
}

/// Least `L ≤ l_max` such that no length-`L` factor occurs both at a
/// multiple of `m` and elsewhere in the window.
pub fn estimate_recognizability_constant(
    stream: &mut FixedPointStream,
    l_max: usize,
    window: usize,
) -> Result<RecognizabilityEstimate, RecognizabilityError> {
    estimate_recognizability_constant_with(stream, l_max, window, &RecognizabilityConfig::default())
}

pub fn estimate_recognizability_constant_with(
    stream: &mut FixedPointStream,
    l_max: usize,
    window: usize,
    config: &RecognizabilityConfig,
) -> Result<RecognizabilityEstimate, RecognizabilityError> {
    check_window(window, config.max_symbols)?;
    check_gates(stream, config.aperiodicity_depth, window)?;
    let m = stream.m();
    require_census(stream, l_max + m, l_max, window)?;
    let text = stream.ensure(window);
    let hash = PrefixHash::new(text);
    let conflicts: Vec<Option<AlignmentConflict>> = (1..=l_max)
        .into_par_iter()
        .map(|len| alignment_conflict(&hash, len, m))
        .collect();
    let n = conflicts
        .iter()
        .position(Option::is_none)
        .map(|i| i + 1)
        .ok_or(RecognizabilityError::NoConstantFound(l_max))?;
    let counterexample = if n > 1 { conflicts[n - 2].clone() } else { None };
    Ok(RecognizabilityEstimate {
        n,
        counterexample,
        window,
    })
}

fn checked_power(m: usize, e: usize) -> Option<usize> {
    m.checked_pow(u32::try_from(e).ok()?)
}

/// Every occurrence of `σ^l(a)` in the window sits at a multiple of `m` and
/// is the image of an occurrence of `σ^(l−1)(a)` at the divided position.
fn desubstitutes(text: &[u8], m: usize, l: usize) -> bool {
    let image_len = m.pow(l as u32);
    let pre_len = image_len / m;
    let image = &text[..image_len];
    let pre = &text[..pre_len];
    (0..=text.len() - image_len)
        .filter(|&q| &text[q..q + image_len] == image)
        .all(|q| q % m == 0 && text[q / m..q / m + pre_len] == *pre)
}

/// Least `l ≤ l_max` for which every in-window occurrence of `σ^l(a)`
/// desubstitutes, re-verified at `l + 1`.
pub fn estimate_n1(
    stream: &mut FixedPointStream,
    l_max: usize,
    window: usize,
) -> Result<usize, RecognizabilityError> {
    estimate_n1_with(stream, l_max, window, &RecognizabilityConfig::default())
}

pub fn estimate_n1_with(
    stream: &mut FixedPointStream,
    l_max: usize,
    window: usize,
    config: &RecognizabilityConfig,
) -> Result<usize, RecognizabilityError> {
    check_window(window, config.max_symbols)?;
    check_gates(stream, config.aperiodicity_depth, window)?;
    let m = stream.m();
    let text = stream.ensure(window);
    for l in 1..=l_max {
        match checked_power(m, l + 1) {
            Some(len) if len <= window => {}
            _ => break,
        }
        if desubstitutes(text, m, l) && desubstitutes(text, m, l + 1) {
            return Ok(l);
        }
    }
    Err(RecognizabilityError::NoConstantFound(l_max))
}

/// Estimates `N` and `N1`, then derives `r`, `p`, `M` and `N' = 2M`.
pub fn derive_n_prime(
    stream: &mut FixedPointStream,
    window: usize,
    config: &RecognizabilityConfig,
) -> Result<RecognizabilityReport, RecognizabilityError> {
    let estimate =
        estimate_recognizability_constant_with(stream, config.factor_len_max, window, config)?;
    let n1 = estimate_n1_with(stream, config.desub_max, window, config)?;
    let m = stream.m();
    let target = estimate.n + m;
    let mut r = 0;
    let p_len = loop {
        let len = checked_power(m, n1 + r).ok_or(RecognizabilityError::ConstantTooLarge {
            what: "p_len",
            value: usize::MAX,
            cap: config.max_symbols,
        })?;
        if len >= target {
            break len;
        }
        r += 1;
    };
    if p_len > config.max_symbols || p_len > window {
        return Err(RecognizabilityError::ConstantTooLarge {
            what: "p_len",
            value: p_len,
            cap: config.max_symbols.min(window),
        });
    }
    let p = stream.prefix(p_len);
    let m_bound = stream
        .return_bound(&p, window)
        .map_err(|_| RecognizabilityError::InsufficientWindow {
            needed: window.saturating_mul(2),
            window,
        })?;
    if m_bound > config.max_symbols {
        return Err(RecognizabilityError::ConstantTooLarge {
            what: "M",
            value: m_bound,
            cap: config.max_symbols,
        });
    }
    Ok(RecognizabilityReport {
        n: estimate.n,
        n1,
        r,
        p,
        m_bound,
        n_prime: 2 * m_bound,
        window,
        counterexample: estimate.counterexample,
    })
}

/// Checks that any two in-window occurrences of a factor of length at least
/// `bound` are congruent modulo `m^i`.
///
/// Occurrences of a longer factor are occurrences of its length-`bound`
/// prefix, so checking length `bound` covers all longer lengths.
pub fn check_power_recognizability(
    stream: &mut FixedPointStream,
    i: usize,
    bound: usize,
    window: usize,
) -> Result<PowerVerdict, RecognizabilityError> {
    check_power_recognizability_with(stream, i, bound, window, &RecognizabilityConfig::default())
}

pub fn check_power_recognizability_with(
    stream: &mut FixedPointStream,
    i: usize,
    bound: usize,
    window: usize,
    config: &RecognizabilityConfig,
) -> Result<PowerVerdict, RecognizabilityError> {
    assert!(bound >= 1);
    check_window(window, config.max_symbols)?;
    check_gates(stream, config.aperiodicity_depth, window)?;
    let modulus = checked_power(stream.m(), i).ok_or(RecognizabilityError::ConstantTooLarge {
        what: "m^i",
        value: usize::MAX,
        cap: config.max_symbols,
    })?;
    if bound + modulus > window {
        return Err(RecognizabilityError::InsufficientWindow {
            needed: bound + modulus,
            window,
        });
    }
    require_census(stream, bound + modulus, bound, window)?;
    let text = stream.ensure(window);
    let hash = PrefixHash::new(text);
    let classes = factor_classes_with(&hash, bound, window - bound + 1);
    for class in classes {
        let alpha = class[0];
        if let Some(&beta) = class.iter().find(|&&b| (b - alpha) % modulus != 0) {
            return Ok(PowerVerdict::Counterexample {
                len: bound,
                modulus,
                alpha,
                beta,
            });
        }
    }
    Ok(PowerVerdict::Holds)
}

/// Desubstitution of the report's prefix and its images: for
/// `t = r, …, r + extra_levels`, every in-window occurrence `q` of
/// `σ^(N1+t)(a)` must satisfy `q ≡ 0 (mod m^t)` with `σ^N1(a)` at `q / m^t`.
/// `t = r` covers `p` itself; larger `t` cover `σ^(t−r)(p)`.
///
/// Returns the first failing `(t, q)`.
pub fn check_prefix_desubstitution(
    stream: &mut FixedPointStream,
    report: &RecognizabilityReport,
    extra_levels: usize,
) -> Result<(), (usize, usize)> {
    let m = stream.m();
    let window = report.window;
    let text = stream.ensure(window);
    let base_len = m.pow(report.n1 as u32);
    for t in report.r..=report.r + extra_levels {
        let divisor = m.pow(t as u32);
        let image_len = base_len * divisor;
        if image_len > window {
            break;
        }
        let image = &text[..image_len];
        let bad = (0..=window - image_len)
            .filter(|&q| text[q..q + image_len] == *image)
            .find(|&q| {
                q % divisor != 0 || text[q / divisor..q / divisor + base_len] != text[..base_len]
            });
        if let Some(q) = bad {
            return Err((t, q));
        }
    }
    Ok(())
}
