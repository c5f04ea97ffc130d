//! Orbits of torsion maps and the structural orbit checks: every orbit of a
//! torsion map on words of length `k` has power-of-two length at most
//! `2^ceil(k/2)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::packed::PackedWord;
use crate::perm::Permutation;

/// Identifies the map an orbit was taken under: torsion by `base` over
/// `alphabet`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapId {
    pub alphabet: Alphabet,
    pub base: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub start: PackedWord,
    pub map: MapId,
    pub length: u64,
    /// Visited codes in orbit order, at most the requested capture limit.
    pub elements: Option<Vec<u32>>,
}

fn check_dims(level: &Permutation, start: PackedWord) -> Result<()> {
    let expected = PackedWord::space_size(start.len());
    if level.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: level.len(),
        });
    }
    Ok(())
}

pub fn orbit_length(level: &Permutation, start: PackedWord) -> Result<u64> {
    check_dims(level, start)?;
    let origin = start.code();
    let mut x = level.apply(origin);
    let mut len = 1u64;
    while x != origin {
        x = level.apply(x);
        len += 1;
    }
    Ok(len)
}

/// Orbit of `start`, optionally recording up to `capture` visited codes.
pub fn orbit(
    level: &Permutation,
    start: PackedWord,
    map: MapId,
    capture: Option<usize>,
) -> Result<OrbitResult> {
    check_dims(level, start)?;
    let origin = start.code();
    let mut elements = capture.map(|_| Vec::new());
    let mut x = origin;
    let mut length = 0u64;
    loop {
        if let (Some(els), Some(limit)) = (elements.as_mut(), capture) {
            if els.len() < limit {
                els.push(x);
            }
        }
        x = level.apply(x);
        length += 1;
        if x == origin {
            break;
        }
    }
    Ok(OrbitResult {
        start,
        map,
        length,
        elements,
    })
}

/// `2^ceil(k/2)`.
pub fn orbit_bound(k: u32) -> u64 {
    1u64 << k.div_ceil(2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitViolation {
    NotPowerOfTwo {
        witness: u32,
        length: u64,
    },
    ExceedsBound {
        witness: u32,
        length: u64,
        bound: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTheoremReport {
    pub k: u32,
    /// Cycle length -> number of cycles.
    pub histogram: BTreeMap<u64, u64>,
    pub violations: Vec<OrbitViolation>,
}

impl OrbitTheoremReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_orbit_theorems(level: &Permutation, k: u32) -> Result<OrbitTheoremReport> {
    if k > crate::packed::MAX_WORD_LEN || level.len() != 1usize << k {
        return Err(Error::DimensionMismatch {
            expected: 1usize << k.min(crate::packed::MAX_WORD_LEN),
            found: level.len(),
        });
    }
    let bound = orbit_bound(k);
    let mut histogram = BTreeMap::new();
    let mut violations = Vec::new();
    level.for_each_cycle(|witness, length| {
        *histogram.entry(length).or_insert(0) += 1;
        if !length.is_power_of_two() {
            violations.push(OrbitViolation::NotPowerOfTwo { witness, length });
        }
        if length > bound {
            violations.push(OrbitViolation::ExceedsBound {
                witness,
                length,
                bound,
            });
        }
    });
    Ok(OrbitTheoremReport {
        k,
        histogram,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Letter;
    use crate::torsion::build_tables;

    fn ab(m: i64, n: i64) -> Alphabet {
        Alphabet::new(m, n).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let table = build_tables(ab(1, 2), 3).unwrap();
        let l1 = table.level(Letter::M, 1).unwrap();
        assert_eq!(orbit_length(l1, PackedWord::all_m(1).unwrap()).unwrap(), 2);
        let l3 = table.level(Letter::M, 3).unwrap();
        assert_eq!(orbit_length(l3, PackedWord::all_m(3).unwrap()).unwrap(), 4);
        let id = Permutation::identity(16);
        for code in 0..16 {
            assert_eq!(
                orbit_length(&id, PackedWord::new(code, 4).unwrap()).unwrap(),
                1
            );
        }
    }

    #[test]
    fn orbit_dimension_mismatch() {
        let id = Permutation::identity(8);
        assert_eq!(
            orbit_length(&id, PackedWord::all_m(4).unwrap()),
            Err(Error::DimensionMismatch {
                expected: 16,
                found: 8
            })
        );
    }

    #[test]
    fn orbit_capture_is_bounded() {
        let table = build_tables(ab(1, 2), 5).unwrap();
        let level = table.level(Letter::M, 5).unwrap();
        let map = MapId {
            alphabet: ab(1, 2),
            base: vec![1],
        };
        let full = orbit(level, PackedWord::all_m(5).unwrap(), map.clone(), Some(100)).unwrap();
        assert_eq!(full.length, 8);
        let els = full.elements.unwrap();
        assert_eq!(els.len(), 8);
        assert_eq!(els[0], 0);
        assert_eq!(els[1], level.apply(0));
        let some = orbit(level, PackedWord::all_m(5).unwrap(), map.clone(), Some(3)).unwrap();
        assert_eq!(some.elements.unwrap().len(), 3);
        let none = orbit(level, PackedWord::all_m(5).unwrap(), map, None).unwrap();
        assert!(none.elements.is_none());
    }

    #[test]
    fn identity_histogram() {
        let r = check_orbit_theorems(&Permutation::identity(64), 6).unwrap();
        assert!(r.holds());
        assert_eq!(r.histogram.into_iter().collect::<Vec<_>>(), vec![(1, 64)]);
    }

    #[test]
    fn violations_carry_witnesses() {
        // 3-cycle on {0,1,2}, fixed 3
        let p = Permutation::from_vec(vec![1, 2, 0, 3]).unwrap();
        let r = check_orbit_theorems(&p, 2).unwrap();
        assert_eq!(
            r.violations,
            vec![
                OrbitViolation::NotPowerOfTwo {
                    witness: 0,
                    length: 3
                },
                OrbitViolation::ExceedsBound {
                    witness: 0,
                    length: 3,
                    bound: 2
                }
            ]
        );
    }

    #[test]
    fn tables_satisfy_orbit_theorems() {
        for (m, n) in [(1, 2), (1, 4)] {
            let table = build_tables(ab(m, n), 12).unwrap();
            for k in 1..=12 {
                for letter in [Letter::M, Letter::N] {
                    let r = check_orbit_theorems(table.level(letter, k).unwrap(), k).unwrap();
                    assert!(r.holds(), "({m},{n}) {letter} k={k}: {:?}", r.violations);
                }
            }
        }
    }

    #[test]
    fn orbit_grows_with_prefix() {
        // The orbit of a word is at least the orbit of any of its prefixes.
        let table = build_tables(ab(1, 2), 10).unwrap();
        for k in 2..=10u32 {
            let level = table.level(Letter::M, k).unwrap();
            let lower = table.level(Letter::M, k - 1).unwrap();
            for code in 0..(1u32 << k) {
                let w = PackedWord::new(code, k).unwrap();
                let prefix = PackedWord::new(code & ((1 << (k - 1)) - 1), k - 1).unwrap();
                assert!(orbit_length(level, w).unwrap() >= orbit_length(lower, prefix).unwrap());
            }
        }
    }
}
