use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered pair of distinct integer letters `(m, n)`.
///
/// Expansion and the definitional oracle need both letters positive; the
/// table engine and extended torsion accept any distinct integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    m: i64,
    n: i64,
}

/// One of the two letters, by role rather than by value.
///
/// In packed words `M` is bit 0 and `N` is bit 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    M,
    N,
}

impl Letter {
    pub fn bit(self) -> u32 {
        match self {
            Letter::M => 0,
            Letter::N => 1,
        }
    }

    pub fn from_bit(bit: u32) -> Letter {
        if bit & 1 == 0 {
            Letter::M
        } else {
            Letter::N
        }
    }

    pub fn other(self) -> Letter {
        match self {
            Letter::M => Letter::N,
            Letter::N => Letter::M,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::M => f.write_str("m"),
            Letter::N => f.write_str("n"),
        }
    }
}

impl Alphabet {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m == n {
            return Err(Error::DegenerateAlphabet(m));
        }
        Ok(Alphabet { m, n })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn is_expansion_valid(&self) -> bool {
        self.m > 0 && self.n > 0
    }

    pub fn require_expansion_valid(&self) -> Result<()> {
        if self.is_expansion_valid() {
            Ok(())
        } else {
            Err(Error::NotExpansionValid {
                m: self.m,
                n: self.n,
            })
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        x == self.m || x == self.n
    }

    pub fn letter(&self, x: i64) -> Result<Letter> {
        if x == self.m {
            Ok(Letter::M)
        } else if x == self.n {
            Ok(Letter::N)
        } else {
            Err(self.outside(x))
        }
    }

    pub fn symbol(&self, letter: Letter) -> i64 {
        match letter {
            Letter::M => self.m,
            Letter::N => self.n,
        }
    }

    /// `m + n - x` for a letter `x`, computed without overflow.
    pub fn complement_of(&self, x: i64) -> Result<i64> {
        Ok(self.symbol(self.letter(x)?.other()))
    }

    pub(crate) fn outside(&self, value: i64) -> Error {
        Error::SymbolOutsideAlphabet {
            value,
            m: self.m,
            n: self.n,
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_equal_letters() {
        assert_eq!(Alphabet::new(3, 3), Err(Error::DegenerateAlphabet(3)));
    }

    #[test]
    fn expansion_validity() {
        assert!(Alphabet::new(1, 2).unwrap().is_expansion_valid());
        assert!(!Alphabet::new(-1, 2).unwrap().is_expansion_valid());
        assert!(!Alphabet::new(1, 0).unwrap().is_expansion_valid());
    }

    #[test]
    fn complement_swaps_letters() {
        let a = Alphabet::new(i64::MAX, i64::MIN).unwrap();
        assert_eq!(a.complement_of(i64::MAX).unwrap(), i64::MIN);
        assert!(a.complement_of(0).is_err());
    }
}
