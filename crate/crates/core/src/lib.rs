//! Anti-powers in fixed points of primitive uniform substitutions.
//!
//! The pipeline: parse a [`Substitution`], expand a fixed point
//! ([`FixedPointStream`]), estimate the recognizability constants
//! ([`recognizability::derive_n_prime`]), compute `C = (N' + 1)·m`
//! ([`theorem::proof_constant`]) and check anti-power block lengths against
//! `C·k` over `(n, k)` grids ([`theorem::verify_theorem`]).

pub mod antipower;
pub mod fingerprint;
pub mod fixedpoint;
pub mod fixtures;
pub mod recognizability;
pub mod substitution;
pub mod theorem;

pub use antipower::{is_anti_power, min_block_length, scan, AntiPowerQuery, AntiPowerResult};
pub use fixedpoint::{Aperiodicity, FixedPointStream, RecurrenceBound};
pub use recognizability::{RecognizabilityConfig, RecognizabilityError, RecognizabilityReport};
pub use substitution::{Letter, Substitution, SubstitutionError, Word};
pub use theorem::{TheoremError, TheoremReport};
