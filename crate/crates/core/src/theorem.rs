//! The anti-power bound `C(σ) = (N' + 1)·m` and its checks.
//!
//! For `k` blocks the construction uses the exponent `i` with
//! `m^(i−1) ≤ k < m^i` (so `k = 1` gives `i = 1`) and blocks of length
//! `N'·m^i + 1`; two of those blocks can only coincide if their starts are
//! congruent modulo `m^i`, which `k < m^i` rules out.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::antipower::{min_block_length_in, scan_with, AntiPowerQuery};
use crate::fingerprint::{first_equal_blocks, PrefixHash};
use crate::fixedpoint::FixedPointStream;
use crate::recognizability::{check_gates, RecognizabilityConfig, RecognizabilityError, RecognizabilityReport};

pub const CSV_VERSION_LINE: &str = "# apw verify v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Recognizability(#[from] RecognizabilityError),
    #[error("no anti-power below the search cap at n={n}, k={k}")]
    SearchExhausted { n: usize, k: usize },
}

/// The exponent `i` with `m^(i−1) ≤ k < m^i`.
pub fn block_exponent(k: usize, m: usize) -> u32 {
    assert!(k >= 1 && m >= 2);
    let mut i = 1;
    let mut power = m;
    while power <= k {
        power *= m;
        i += 1;
    }
    i
}

/// `(N' + 1)·m`, after re-running the primitivity and aperiodicity gates.
pub fn proof_constant(
    stream: &mut FixedPointStream,
    report: &RecognizabilityReport,
) -> Result<usize, RecognizabilityError> {
    let depth = RecognizabilityConfig::default().aperiodicity_depth;
    check_gates(stream, depth, report.window)?;
    Ok((report.n_prime + 1) * stream.m())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructionVerdict {
    pub i: u32,
    pub block_len: usize,
    pub distinct: bool,
}

fn construction_block_len(n_prime: usize, m: usize, i: u32) -> usize {
    n_prime * m.pow(i) + 1
}

/// Checks that the `k` blocks of length `N'·m^i + 1` starting at `n` are
/// pairwise distinct.
pub fn verify_construction(
    stream: &mut FixedPointStream,
    n: usize,
    k: usize,
    n_prime: usize,
) -> ConstructionVerdict {
    let m = stream.m();
    let i = block_exponent(k, m);
    let block_len = construction_block_len(n_prime, m, i);
    let text = stream.ensure(n + k * block_len);
    let hash = PrefixHash::new(text);
    ConstructionVerdict {
        i,
        block_len,
        distinct: first_equal_blocks(&hash, n, k, block_len).is_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremRow {
    pub n: usize,
    pub k: usize,
    pub i: u32,
    /// Construction block length, when the construction was checked.
    pub block_len: Option<usize>,
    pub min_ell: Option<usize>,
    pub construction: Option<bool>,
}

impl TheoremRow {
    pub fn ratio(&self) -> Option<f64> {
        self.min_ell.map(|ell| ell as f64 / self.k as f64)
    }

    pub fn ok(&self) -> bool {
        self.min_ell.is_some() && self.construction != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub c: usize,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub rows: Vec<TheoremRow>,
    pub violations: Vec<(usize, usize)>,
    /// Max over successful cells of `⌈min_ell / k⌉`.
    pub c_empirical: Option<usize>,
}

impl TheoremReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_VERSION_LINE}")?;
        writeln!(out, "n,k,i,block_len,min_ell,ratio,ok")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                row.n,
                row.k,
                row.i,
                opt(row.block_len),
                opt(row.min_ell),
                row.ratio().map(|r| format!("{r:.6}")).unwrap_or_default(),
                row.ok()
            )?;
        }
        Ok(())
    }
}

fn opt(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// For every `(n, k)`, searches an anti-power with blocks of length at most
/// `C·k`. Cells that fail are listed in `violations`.
pub fn verify_bound(
    stream: &mut FixedPointStream,
    ns: &[usize],
    ks: &[usize],
    c: usize,
) -> TheoremReport {
    verify_theorem(stream, ns, ks, c, None)
}

/// [`verify_bound`], plus the construction check with `N'` when given.
pub fn verify_theorem(
    stream: &mut FixedPointStream,
    ns: &[usize],
    ks: &[usize],
    c: usize,
    n_prime: Option<usize>,
) -> TheoremReport {
    let m = stream.m();
    let cells: Vec<(usize, usize)> = ns
        .iter()
        .flat_map(|&n| ks.iter().map(move |&k| (n, k)))
        .collect();
    let span = cells
        .iter()
        .map(|&(n, k)| {
            let search = n + k * c * k;
            let construction = n_prime
                .map(|np| n + k * construction_block_len(np, m, block_exponent(k, m)))
                .unwrap_or(0);
            search.max(construction)
        })
        .max()
        .unwrap_or(0);
    let text = stream.ensure(span);
    let hash = PrefixHash::new(text);
    let rows: Vec<TheoremRow> = cells
        .par_iter()
        .map(|&(n, k)| {
            let i = block_exponent(k, m);
            let min_ell = min_block_length_in(&hash, AntiPowerQuery::new(n, k, (c * k).max(1)));
            let (block_len, construction) = match n_prime {
                Some(np) => {
                    let len = construction_block_len(np, m, i);
                    (Some(len), Some(first_equal_blocks(&hash, n, k, len).is_none()))
                }
                None => (None, None),
            };
            TheoremRow {
                n,
                k,
                i,
                block_len,
                min_ell,
                construction,
            }
        })
        .collect();
    let violations = rows
        .iter()
        .filter(|r| !r.ok())
        .map(|r| (r.n, r.k))
        .collect();
    let c_empirical = rows
        .iter()
        .filter_map(|r| r.min_ell.map(|ell| ell.div_ceil(r.k)))
        .max();
    TheoremReport {
        c,
        ns: ns.to_vec(),
        ks: ks.to_vec(),
        rows,
        violations,
        c_empirical,
    }
}

/// Max over the grid of `⌈min_ell / k⌉`, searching up to `ell_cap`.
/// An empty grid gives 0.
pub fn empirical_constant(
    stream: &mut FixedPointStream,
    ns: &[usize],
    ks: &[usize],
    ell_cap: usize,
) -> Result<usize, TheoremError> {
    let rows = scan_with(stream, ns, ks, |_| ell_cap);
    let mut best = 0;
    for row in rows {
        let ell = row.min_ell.ok_or(TheoremError::SearchExhausted {
            n: row.query.n,
            k: row.query.k,
        })?;
        best = best.max(ell.div_ceil(row.query.k));
    }
    Ok(best)
}
