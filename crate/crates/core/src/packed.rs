//! Words over a two-letter alphabet packed into integer codes.
//!
//! Term `i` (1-based) of a word lives in bit `i - 1` of its code, with a clear
//! bit meaning `m` and a set bit meaning `n`. Dropping the first term is then
//! a right shift, and two words agree in their first `j` terms exactly when
//! their codes agree in bits `0..j`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

pub const MAX_WORD_LEN: u32 = 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PackedWord {
    code: u32,
    len: u32,
}

impl PackedWord {
    pub fn new(code: u32, len: u32) -> Result<Self> {
        if len > MAX_WORD_LEN {
            return Err(Error::WordTooLong(len as usize));
        }
        if u64::from(code) >= 1u64 << len {
            return Err(Error::CodeOutOfRange { code, len });
        }
        Ok(PackedWord { code, len })
    }

    /// The word `m^len`.
    pub fn all_m(len: u32) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of codes of this length, `2^len`.
    pub fn space_size(len: u32) -> usize {
        1usize << len
    }

    pub fn letter_at(&self, index: u32) -> Letter {
        Letter::from_bit((self.code >> index) & 1)
    }

    pub fn decode(&self, alphabet: &Alphabet) -> Vec<i64> {
        (0..self.len)
            .map(|i| alphabet.symbol(self.letter_at(i)))
            .collect()
    }

    pub fn encode(alphabet: &Alphabet, t: &[i64]) -> Result<Self> {
        if t.len() > MAX_WORD_LEN as usize {
            return Err(Error::WordTooLong(t.len()));
        }
        let mut code = 0u32;
        for (i, &x) in t.iter().enumerate() {
            code |= alphabet.letter(x)?.bit() << i;
        }
        Ok(PackedWord {
            code,
            len: t.len() as u32,
        })
    }

    pub fn first_symbol_bit(&self) -> Result<u32> {
        if self.len == 0 {
            return Err(Error::EmptyWord);
        }
        Ok(self.code & 1)
    }

    pub fn drop_first(&self) -> Result<Self> {
        if self.len == 0 {
            return Err(Error::EmptyWord);
        }
        Ok(PackedWord {
            code: self.code >> 1,
            len: self.len - 1,
        })
    }

    /// Adds a new first term; the old terms move up one position.
    pub fn prepend_bit(&self, bit: u32) -> Result<Self> {
        if self.len >= MAX_WORD_LEN {
            return Err(Error::WordTooLong(self.len as usize + 1));
        }
        Ok(PackedWord {
            code: (self.code << 1) | (bit & 1),
            len: self.len + 1,
        })
    }

    /// Termwise complement: every bit flipped.
    pub fn complement(&self) -> Self {
        let mask = ((1u64 << self.len) - 1) as u32;
        PackedWord {
            code: self.code ^ mask,
            len: self.len,
        }
    }

    /// Length of the longest common prefix of two equal-length words.
    pub fn common_prefix_len(&self, other: &PackedWord) -> u32 {
        let diff = self.code ^ other.code;
        diff.trailing_zeros().min(self.len.min(other.len))
    }
}

impl fmt::Display for PackedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", (self.code >> i) & 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(m: i64, n: i64) -> Alphabet {
        Alphabet::new(m, n).unwrap()
    }

    #[test]
    fn decode_examples() {
        let n = 6;
        let a = ab(1, n);
        let w = PackedWord::new(13, 5).unwrap();
        assert_eq!(w.decode(&a), vec![n, 1, n, n, 1]);
        assert_eq!(PackedWord::new(0, 4).unwrap().decode(&a), vec![1; 4]);
        assert_eq!(PackedWord::new(7, 3).unwrap().decode(&a), vec![n; 3]);
    }

    #[test]
    fn encode_examples() {
        let a = ab(1, 6);
        assert_eq!(
            PackedWord::encode(&a, &[6, 1, 6, 6, 1]).unwrap(),
            PackedWord::new(13, 5).unwrap()
        );
        assert_eq!(
            PackedWord::encode(&a, &[1]).unwrap(),
            PackedWord::new(0, 1).unwrap()
        );
        assert_eq!(
            PackedWord::encode(&ab(1, 2), &[1, 1, 1]).unwrap(),
            PackedWord::new(0, 3).unwrap()
        );
    }

    #[test]
    fn encode_errors() {
        let a = ab(1, 2);
        assert!(matches!(
            PackedWord::encode(&a, &[1, 3]),
            Err(Error::SymbolOutsideAlphabet { value: 3, .. })
        ));
        assert_eq!(
            PackedWord::encode(&a, &[1; 32]),
            Err(Error::WordTooLong(32))
        );
        assert!(PackedWord::encode(&a, &[1; 31]).is_ok());
        assert_eq!(
            PackedWord::new(8, 3),
            Err(Error::CodeOutOfRange { code: 8, len: 3 })
        );
    }

    #[test]
    fn bit_views() {
        let w = PackedWord::new(13, 5).unwrap();
        assert_eq!(w.drop_first().unwrap(), PackedWord::new(6, 4).unwrap());
        assert_eq!(w.first_symbol_bit().unwrap(), 1);
        assert_eq!(PackedWord::new(6, 4).unwrap().prepend_bit(1).unwrap(), w);
        let empty = PackedWord::new(0, 0).unwrap();
        assert_eq!(empty.drop_first(), Err(Error::EmptyWord));
        assert_eq!(empty.first_symbol_bit(), Err(Error::EmptyWord));
    }

    #[test]
    fn decode_is_a_bijection_up_to_twelve() {
        let a = ab(2, 5);
        for k in 0..=12u32 {
            let mut seen = std::collections::HashSet::new();
            for code in 0..(1u32 << k) {
                let w = PackedWord::new(code, k).unwrap();
                let t = w.decode(&a);
                assert_eq!(t.len(), k as usize);
                assert_eq!(PackedWord::encode(&a, &t).unwrap(), w);
                assert!(seen.insert(t));
            }
            assert_eq!(seen.len(), 1 << k);
        }
    }

    #[test]
    fn complement_is_bitwise_not() {
        let a = ab(1, 4);
        for code in 0..64u32 {
            let w = PackedWord::new(code, 6).unwrap();
            let t = crate::rle::complement(&a, &w.decode(&a)).unwrap();
            assert_eq!(PackedWord::encode(&a, &t).unwrap().code(), 63 ^ code);
            assert_eq!(w.complement().code(), 63 ^ code);
        }
    }

    #[test]
    fn common_prefix_matches_termwise_agreement() {
        let a = ab(1, 2);
        for x in 0..32u32 {
            for y in 0..32u32 {
                let (wx, wy) = (
                    PackedWord::new(x, 5).unwrap(),
                    PackedWord::new(y, 5).unwrap(),
                );
                let (tx, ty) = (wx.decode(&a), wy.decode(&a));
                let agree = tx.iter().zip(&ty).take_while(|(p, q)| p == q).count() as u32;
                assert_eq!(wx.common_prefix_len(&wy), agree);
            }
        }
    }
}
