//! Definitional run-length calculus: `R`, single-level inversion, the
//! expansion `E`, the torsion `C` read off intermediate expansions, and
//! Kolakoski prefixes.
//!
//! Everything here materializes full sequences. It is slow on purpose and
//! serves as the reference every packed or table-driven path is checked
//! against.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// Default ceiling on the number of terms a single expansion may produce.
pub const DEFAULT_TERM_CAP: u64 = 1 << 28;

/// Sequence of maximal-run lengths of `s`.
pub fn run_lengths(s: &[i64]) -> Result<Vec<i64>> {
    let (&first, rest) = s.split_first().ok_or(Error::EmptySequence)?;
    let mut out = Vec::new();
    let mut current = first;
    let mut len = 1i64;
    for &x in rest {
        if x == current {
            len += 1;
        } else {
            out.push(len);
            current = x;
            len = 1;
        }
    }
    out.push(len);
    Ok(out)
}

/// Termwise `x -> m + n - x`.
pub fn complement(alphabet: &Alphabet, t: &[i64]) -> Result<Vec<i64>> {
    t.iter().map(|&x| alphabet.complement_of(x)).collect()
}

/// Expansion oracle with a configurable output ceiling.
#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    alphabet: Alphabet,
    term_cap: u64,
}

impl Oracle {
    pub fn new(alphabet: Alphabet) -> Result<Self> {
        Self::with_cap(alphabet, DEFAULT_TERM_CAP)
    }

    pub fn with_cap(alphabet: Alphabet, term_cap: u64) -> Result<Self> {
        alphabet.require_expansion_valid()?;
        Ok(Oracle { alphabet, term_cap })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// Length of the single-level inversion of `s`, after validating its terms.
    fn inverted_len(&self, s: &[i64]) -> Result<u64> {
        let mut total: u64 = 0;
        for (index, &value) in s.iter().enumerate() {
            if value <= 0 {
                return Err(Error::NonPositiveRun { index, value });
            }
            total = total
                .checked_add(value as u64)
                .ok_or(Error::LengthOverflow)?;
        }
        if total > self.term_cap {
            return Err(Error::TooLarge {
                len: total,
                cap: self.term_cap,
            });
        }
        Ok(total)
    }

    /// The unique word over the alphabet starting with `start` whose run
    /// lengths are `s`.
    pub fn expand_step(&self, s: &[i64], start: i64) -> Result<Vec<i64>> {
        let mut symbol = start;
        let mut other = self.alphabet.complement_of(start)?;
        let len = self.inverted_len(s)?;
        let mut out = Vec::with_capacity(len as usize);
        for &run in s {
            out.extend(std::iter::repeat_n(symbol, run as usize));
            std::mem::swap(&mut symbol, &mut other);
        }
        Ok(out)
    }

    /// `E(s, t)`: expand once per starting point, `t[0]` first.
    pub fn expand(&self, s: &[i64], t: &[i64]) -> Result<Vec<i64>> {
        if t.is_empty() {
            return Err(Error::EmptyStartingPoints);
        }
        let mut current = self.expand_step(s, t[0])?;
        for &start in &t[1..] {
            current = self.expand_step(&current, start)?;
        }
        Ok(current)
    }

    /// `C(s, t)`: the complement of the last term of each intermediate
    /// expansion `E(s, t[..k])`, for `k = 1..=|t|`.
    pub fn torsion(&self, s: &[i64], t: &[i64]) -> Result<Vec<i64>> {
        if t.is_empty() {
            return Ok(Vec::new());
        }
        if s.is_empty() {
            return Err(Error::EmptyBase);
        }
        let mut out = Vec::with_capacity(t.len());
        let mut current: Vec<i64> = s.to_vec();
        for &start in t {
            current = self.expand_step(&current, start)?;
            // s non-empty with positive terms, so every expansion is non-empty
            let last = *current.last().expect("non-empty expansion");
            out.push(self.alphabet.complement_of(last)?);
        }
        Ok(out)
    }

    /// First `len` terms of `K(m, n)`, read off its own run lengths.
    pub fn kolakoski_prefix(&self, len: usize) -> Result<Vec<i64>> {
        if len == 0 {
            return Err(Error::InvalidArgument(
                "Kolakoski prefix length must be at least 1".into(),
            ));
        }
        if len as u64 > self.term_cap {
            return Err(Error::TooLarge {
                len: len as u64,
                cap: self.term_cap,
            });
        }
        let (m, n) = (self.alphabet.m(), self.alphabet.n());
        let mut out: Vec<i64> = Vec::with_capacity(len + m.max(n) as usize);
        let mut symbol = m;
        let mut run = 0usize;
        while out.len() < len {
            // The run being written may be the one whose length we need to read.
            let run_len = if run < out.len() { out[run] } else { symbol };
            out.extend(std::iter::repeat_n(symbol, run_len as usize));
            symbol = if symbol == m { n } else { m };
            run += 1;
        }
        out.truncate(len);
        Ok(out)
    }
}

pub fn expand_step(alphabet: &Alphabet, s: &[i64], start: i64) -> Result<Vec<i64>> {
    Oracle::new(*alphabet)?.expand_step(s, start)
}

pub fn expand(alphabet: &Alphabet, s: &[i64], t: &[i64]) -> Result<Vec<i64>> {
    Oracle::new(*alphabet)?.expand(s, t)
}

/// Torsion computed directly from intermediate expansions.
///
/// An empty `t` yields an empty result for any alphabet.
pub fn torsion_oracle(alphabet: &Alphabet, s: &[i64], t: &[i64]) -> Result<Vec<i64>> {
    if t.is_empty() {
        return Ok(Vec::new());
    }
    Oracle::new(*alphabet)?.torsion(s, t)
}

pub fn kolakoski_prefix(alphabet: &Alphabet, len: usize) -> Result<Vec<i64>> {
    Oracle::new(*alphabet)?.kolakoski_prefix(len)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(m: i64, n: i64) -> Alphabet {
        Alphabet::new(m, n).unwrap()
    }

    const K12_15: [i64; 15] = [1, 2, 2, 1, 1, 2, 1, 2, 2, 1, 2, 2, 1, 1, 2];

    #[test]
    fn run_lengths_examples() {
        assert_eq!(run_lengths(&[1, 2, 2, 1, 1, 2]).unwrap(), vec![1, 2, 2, 1]);
        assert_eq!(run_lengths(&[5]).unwrap(), vec![1]);
        assert_eq!(run_lengths(&[]), Err(Error::EmptySequence));
        assert_eq!(
            Error::EmptySequence.to_string(),
            "empty sequence has no run-length encoding"
        );
    }

    #[test]
    fn run_lengths_of_kolakoski_prefix_is_a_prefix() {
        let r = run_lengths(&K12_15).unwrap();
        assert!(r.len() >= 9);
        // The last run may be cut short, so compare all but the final run.
        assert_eq!(&r[..r.len() - 1], &K12_15[..r.len() - 1]);
    }

    #[test]
    fn expand_step_examples() {
        let a = ab(1, 2);
        assert_eq!(expand_step(&a, &[1, 2, 2], 1).unwrap(), vec![1, 2, 2, 1, 1]);
        assert_eq!(expand_step(&a, &[1], 2).unwrap(), vec![2]);
        assert_eq!(expand_step(&a, &[2], 1).unwrap(), vec![1, 1]);
    }

    #[test]
    fn expand_step_errors() {
        let a = ab(1, 2);
        assert_eq!(
            expand_step(&a, &[1, 0], 1),
            Err(Error::NonPositiveRun { index: 1, value: 0 })
        );
        assert!(matches!(
            expand_step(&a, &[1], 3),
            Err(Error::SymbolOutsideAlphabet { value: 3, .. })
        ));
        assert!(matches!(
            expand_step(&ab(-1, 2), &[1], 2),
            Err(Error::NotExpansionValid { .. })
        ));
        let small = Oracle::with_cap(a, 4).unwrap();
        assert_eq!(
            small.expand_step(&[2, 3], 1),
            Err(Error::TooLarge { len: 5, cap: 4 })
        );
        assert_eq!(
            Oracle::new(a)
                .unwrap()
                .expand_step(&[i64::MAX, i64::MAX, 2], 1),
            Err(Error::LengthOverflow)
        );
    }

    #[test]
    fn expand_examples() {
        let a = ab(1, 2);
        assert_eq!(expand(&a, &[1, 1], &[1, 1]).unwrap(), vec![1, 2, 2]);
        assert_eq!(expand(&a, &[1], &[1]).unwrap(), vec![1]);
        assert_eq!(expand(&a, &[1], &[]), Err(Error::EmptyStartingPoints));
    }

    #[test]
    fn expanding_kolakoski_reproduces_it() {
        let a = ab(1, 2);
        let k = kolakoski_prefix(&a, 200).unwrap();
        for len in [5usize, 15, 60] {
            let e = expand(&a, &k[..len], &[1]).unwrap();
            assert!(e.len() >= len);
            assert_eq!(&e[..], &k[..e.len()]);
        }
        // R^k(K) = K, first term m: E(K, m^k) = K
        let e = expand(&a, &k[..20], &[1, 1, 1]).unwrap();
        assert_eq!(&e[..], &k[..e.len()]);
    }

    #[test]
    fn expansion_satisfies_defining_conditions() {
        let a = ab(1, 3);
        let s = [3, 1, 1, 3, 2];
        let t = [3, 1, 1, 3];
        let e = expand(&a, &s, &t).unwrap();
        let mut level = e.clone();
        for k in 0..t.len() {
            assert!(level.iter().all(|&x| a.contains(x)));
            assert_eq!(level[0], t[t.len() - 1 - k]);
            level = run_lengths(&level).unwrap();
        }
        assert_eq!(level, s);
    }

    #[test]
    fn torsion_examples() {
        let a = ab(1, 2);
        assert_eq!(torsion_oracle(&a, &[1], &[1]).unwrap(), vec![2]);
        assert_eq!(torsion_oracle(&a, &[1], &[2]).unwrap(), vec![1]);
        assert_eq!(torsion_oracle(&a, &[1], &[]).unwrap(), Vec::<i64>::new());
        assert_eq!(
            torsion_oracle(&ab(-3, 7), &[], &[]).unwrap(),
            Vec::<i64>::new()
        );
        assert_eq!(torsion_oracle(&a, &[], &[1]), Err(Error::EmptyBase));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement(&ab(1, 2), &[1, 2, 2]).unwrap(), vec![2, 1, 1]);
        assert_eq!(complement(&ab(1, 4), &[4]).unwrap(), vec![1]);
        assert_eq!(complement(&ab(1, 4), &[]).unwrap(), Vec::<i64>::new());
        assert!(complement(&ab(1, 4), &[2]).is_err());
    }

    #[test]
    fn kolakoski_prefix_examples() {
        assert_eq!(kolakoski_prefix(&ab(1, 2), 15).unwrap(), K12_15.to_vec());
        assert_eq!(kolakoski_prefix(&ab(1, 2), 1).unwrap(), vec![1]);
        assert_eq!(kolakoski_prefix(&ab(2, 1), 5).unwrap(), vec![2, 2, 1, 1, 2]);
        assert!(kolakoski_prefix(&ab(1, 2), 0).is_err());
    }

    #[test]
    fn kolakoski_prefix_is_self_describing() {
        for (m, n) in [(1, 2), (2, 1), (1, 3), (3, 2), (2, 4)] {
            let k = kolakoski_prefix(&ab(m, n), 500).unwrap();
            assert_eq!(k[0], m);
            let r = run_lengths(&k).unwrap();
            assert_eq!(&r[..r.len() - 1], &k[..r.len() - 1], "alphabet ({m},{n})");
        }
    }
}
