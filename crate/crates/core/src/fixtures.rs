//! Reference substitutions used throughout the tests and docs.

/// Thue–Morse: primitive, aperiodic.
pub const THUE_MORSE: &str = "0 -> 01\n1 -> 10\n";

/// Period-doubling: primitive (exponent 2), aperiodic.
pub const PERIOD_DOUBLING: &str = "0 -> 01\n1 -> 00\n";

/// Cantor word: not primitive; its fixed point from 0 has unbounded runs of 1.
pub const CANTOR: &str = "0 -> 010\n1 -> 111\n";

/// Primitive but its only fixed point is (01)^∞.
pub const PERIODIC: &str = "0 -> 01\n1 -> 01\n";
