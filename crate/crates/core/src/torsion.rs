//! Torsion maps on packed words.
//!
//! [`build_tables`] stores `C(m, -)` and `C(n, -)` on every word length up
//! to `k_max` as permutations of codes. Level `k` is derived from level
//! `k - 1` through
//!
//! ```text
//! C(x, t1 t') = (m + n - t1) . C(t1, -)^x (t')
//! ```
//!
//! with the power taken along cycles, so `x` may be large or negative.
//! [`ExtendedTorsion`] evaluates the same recursion on explicit sequences and
//! is independent of the tables.

use std::collections::HashMap;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::packed::{PackedWord, MAX_WORD_LEN};
use crate::perm::{find_defect, Permutation};

/// Default ceiling for table construction, 2 GiB.
pub const DEFAULT_MEMORY_CAP: u64 = 2 << 30;

/// Both torsion maps of an alphabet, for every word length `1..=k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionTable {
    alphabet: Alphabet,
    maps_m: Vec<Permutation>,
    maps_n: Vec<Permutation>,
}

/// Peak bytes used while building tables up to `k_max`: every retained
/// level plus the two powered copies of the previous level and their
/// visited flags.
pub fn build_memory_bytes(k_max: u32) -> u64 {
    let retained = 2 * 4 * ((1u64 << (k_max + 1)) - 2);
    let prev = 1u64 << k_max.saturating_sub(1);
    retained + 2 * 4 * prev + prev
}

#[derive(Clone, Copy, Debug)]
pub struct TableBuilder {
    memory_cap: u64,
}

impl Default for TableBuilder {
    fn default() -> Self {
        TableBuilder {
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

impl TableBuilder {
    pub fn with_memory_cap(memory_cap: u64) -> Self {
        TableBuilder { memory_cap }
    }

    pub fn memory_cap(&self) -> u64 {
        self.memory_cap
    }

    pub fn build(&self, alphabet: Alphabet, k_max: u32) -> Result<TorsionTable> {
        if !(1..=MAX_WORD_LEN).contains(&k_max) {
            return Err(Error::KMaxOutOfRange(k_max));
        }
        let needed = build_memory_bytes(k_max);
        if needed > self.memory_cap {
            return Err(Error::MemoryBudget {
                needed,
                cap: self.memory_cap,
            });
        }

        let mut maps_m = Vec::with_capacity(k_max as usize);
        let mut maps_n = Vec::with_capacity(k_max as usize);
        // A single term is always flipped.
        maps_m.push(Permutation::from_vec_unchecked(vec![1, 0]));
        maps_n.push(Permutation::from_vec_unchecked(vec![1, 0]));

        for k in 2..=k_max {
            let prev_m = &maps_m[k as usize - 2];
            let prev_n = &maps_n[k as usize - 2];
            let next_m = next_level(prev_m, prev_n, alphabet.m(), k);
            let next_n = next_level(prev_m, prev_n, alphabet.n(), k);
            maps_m.push(next_m);
            maps_n.push(next_n);
        }
        Ok(TorsionTable {
            alphabet,
            maps_m,
            maps_n,
        })
    }
}

/// One level of `C(x, -)`: the two powers `C(m, -)^x` and `C(n, -)^x` of the
/// previous level are computed once and shared by every entry.
fn next_level(prev_m: &Permutation, prev_n: &Permutation, exponent: i64, k: u32) -> Permutation {
    let by_first = [prev_m.power(exponent), prev_n.power(exponent)];
    let size = 1usize << k;
    let mut map = Vec::with_capacity(size);
    for code in 0..size as u32 {
        let first = code & 1;
        let rest = code >> 1;
        map.push((by_first[first as usize].apply(rest) << 1) | (first ^ 1));
    }
    Permutation::from_vec_unchecked(map)
}

pub fn build_tables(alphabet: Alphabet, k_max: u32) -> Result<TorsionTable> {
    TableBuilder::default().build(alphabet, k_max)
}

impl TorsionTable {
    /// Assembles a table from raw levels (index `0` is word length 1),
    /// rejecting any level that is not a permutation of the right size.
    pub fn from_levels(
        alphabet: Alphabet,
        levels_m: Vec<Vec<u32>>,
        levels_n: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let k_max = levels_m.len();
        if k_max == 0 || k_max > MAX_WORD_LEN as usize {
            return Err(Error::KMaxOutOfRange(k_max as u32));
        }
        if levels_n.len() != k_max {
            return Err(Error::DimensionMismatch {
                expected: k_max,
                found: levels_n.len(),
            });
        }
        let mut maps_m = Vec::with_capacity(k_max);
        let mut maps_n = Vec::with_capacity(k_max);
        for (idx, (lm, ln)) in levels_m.into_iter().zip(levels_n).enumerate() {
            let k = idx as u32 + 1;
            maps_m.push(checked_level(Letter::M, k, lm)?);
            maps_n.push(checked_level(Letter::N, k, ln)?);
        }
        Ok(TorsionTable {
            alphabet,
            maps_m,
            maps_n,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn k_max(&self) -> u32 {
        self.maps_m.len() as u32
    }

    pub fn level(&self, letter: Letter, k: u32) -> Result<&Permutation> {
        if k == 0 || k > self.k_max() {
            return Err(Error::LevelMissing {
                k,
                k_max: self.k_max(),
            });
        }
        let maps = match letter {
            Letter::M => &self.maps_m,
            Letter::N => &self.maps_n,
        };
        Ok(&maps[k as usize - 1])
    }

    /// `C(x, w)` for `x` the given letter.
    pub fn apply(&self, letter: Letter, word: PackedWord) -> Result<PackedWord> {
        if word.is_empty() {
            return Ok(word);
        }
        let level = self.level(letter, word.len())?;
        PackedWord::new(level.apply(word.code()), word.len())
    }

    /// `C(s, w)` for a base sequence over the alphabet, one letter at a time.
    pub fn apply_sequence(&self, s: &[i64], word: PackedWord) -> Result<PackedWord> {
        let mut w = word;
        for &x in s {
            w = self.apply(self.alphabet.letter(x)?, w)?;
        }
        Ok(w)
    }

    /// Consumes the table, keeping only levels `1..=k`.
    pub fn truncate(mut self, k: u32) -> Result<Self> {
        if k == 0 || k > self.k_max() {
            return Err(Error::LevelMissing {
                k,
                k_max: self.k_max(),
            });
        }
        self.maps_m.truncate(k as usize);
        self.maps_n.truncate(k as usize);
        Ok(self)
    }
}

fn checked_level(letter: Letter, k: u32, level: Vec<u32>) -> Result<Permutation> {
    let expected = 1usize << k;
    if level.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: level.len(),
        });
    }
    if let Some(index) = find_defect(&level) {
        return Err(Error::LevelNotPermutation { letter, k, index });
    }
    Ok(Permutation::from_vec_unchecked(level))
}

/// Torsion by a single integer, defined for any distinct integer letters and
/// any integer `x`:
///
/// * `C(x, ()) = ()`
/// * `C(x, t1 t') = (m + n - t1) . C(t1, -)^x (t')`
///
/// Powers are reduced along the orbit of `t'`, so negative `x` means the
/// inverse map. Results are memoized per evaluator; reuse one evaluator for
/// many queries on the same alphabet.
///
/// For `x = 0` the first term is still flipped. This does not make
/// `C(0, -)` the identity map.
#[derive(Debug, Clone)]
pub struct ExtendedTorsion {
    alphabet: Alphabet,
    memo: HashMap<(i64, Vec<i64>), Vec<i64>>,
}

impl ExtendedTorsion {
    pub fn new(alphabet: Alphabet) -> Self {
        ExtendedTorsion {
            alphabet,
            memo: HashMap::new(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn apply(&mut self, x: i64, t: &[i64]) -> Result<Vec<i64>> {
        for &term in t {
            if !self.alphabet.contains(term) {
                return Err(self.alphabet.outside(term));
            }
        }
        Ok(self.torsion(x, t))
    }

    /// Left fold over `s`: `C(s1 s2, t) = C(s2, C(s1, t))`.
    pub fn apply_sequence(&mut self, s: &[i64], t: &[i64]) -> Result<Vec<i64>> {
        let mut current = t.to_vec();
        for &x in s {
            current = self.apply(x, &current)?;
        }
        Ok(current)
    }

    fn torsion(&mut self, x: i64, t: &[i64]) -> Vec<i64> {
        let Some((&first, rest)) = t.split_first() else {
            return Vec::new();
        };
        let key = (x, t.to_vec());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let flipped = if first == self.alphabet.m() {
            self.alphabet.n()
        } else {
            self.alphabet.m()
        };
        let mut out = Vec::with_capacity(t.len());
        out.push(flipped);
        out.extend(self.power(first, x, rest));
        self.memo.insert(key, out.clone());
        out
    }

    /// `C(base, -)^e (w)`.
    fn power(&mut self, base: i64, e: i64, w: &[i64]) -> Vec<i64> {
        if w.is_empty() || e == 0 {
            return w.to_vec();
        }
        if e == 1 {
            return self.torsion(base, w);
        }
        let mut orbit = vec![w.to_vec()];
        loop {
            let next = self.torsion(base, orbit.last().expect("orbit is non-empty"));
            if next == w {
                break;
            }
            orbit.push(next);
        }
        let idx = e.rem_euclid(orbit.len() as i64) as usize;
        orbit.swap_remove(idx)
    }
}

pub fn extended_torsion(alphabet: &Alphabet, x: i64, t: &[i64]) -> Result<Vec<i64>> {
    ExtendedTorsion::new(*alphabet).apply(x, t)
}

/// `C(s, t)` for an arbitrary integer base sequence `s`.
pub fn torsion_by_sequence(alphabet: &Alphabet, s: &[i64], t: &[i64]) -> Result<Vec<i64>> {
    ExtendedTorsion::new(*alphabet).apply_sequence(s, t)
}
