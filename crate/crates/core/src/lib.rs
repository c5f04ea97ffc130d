//! Run-length expansion calculus for two-letter Kolakoski-type sequences.
//!
//! * [`rle`]: run lengths, expansion `E`, torsion `C` by direct expansion,
//!   Kolakoski prefixes. Slow and literal; the reference for everything else.
//! * [`packed`]: words over `{m, n}` as bit codes.
//! * [`torsion`]: torsion maps as per-length permutation tables, plus the
//!   recursive extended torsion for arbitrary integer letters.
//! * [`orbit`]: orbit lengths and the structural orbit checks.
//! * [`harness`]: conjecture checks, sweeps and reports.
//! * [`cache`]: the `KTOR` table file format.

pub mod alphabet;
pub mod cache;
pub mod error;
pub mod harness;
pub mod orbit;
pub mod packed;
pub mod perm;
pub mod rle;
pub mod selfcheck;
pub mod torsion;

pub use alphabet::{Alphabet, Letter};
pub use error::{Error, Result};
pub use packed::PackedWord;
pub use perm::{permutation_power, Permutation};
pub use torsion::{build_tables, extended_torsion, torsion_by_sequence, TorsionTable};
