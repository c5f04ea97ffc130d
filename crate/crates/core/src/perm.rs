//! Permutations of `0..len` stored as `u32` images, with cycle-based
//! exponentiation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<u32>,
}

/// First index whose image is out of range or repeats an earlier image.
pub fn find_defect(map: &[u32]) -> Option<usize> {
    let mut seen = vec![false; map.len()];
    for (index, &value) in map.iter().enumerate() {
        let v = value as usize;
        if v >= map.len() || seen[v] {
            return Some(index);
        }
        seen[v] = true;
    }
    None
}

impl Permutation {
    pub fn from_vec(map: Vec<u32>) -> Result<Self> {
        if map.len() > u32::MAX as usize {
            return Err(Error::InvalidArgument("permutation too large".into()));
        }
        if let Some(index) = find_defect(&map) {
            return Err(Error::NotPermutation {
                index,
                value: map[index],
            });
        }
        Ok(Permutation { map })
    }

    /// Caller guarantees `map` is a bijection on `0..map.len()`.
    pub(crate) fn from_vec_unchecked(map: Vec<u32>) -> Self {
        debug_assert!(find_defect(&map).is_none());
        Permutation { map }
    }

    pub fn identity(len: usize) -> Self {
        Permutation {
            map: (0..len as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, index: u32) -> u32 {
        self.map[index as usize]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.map
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Permutation {
            map: other.map.iter().map(|&x| self.map[x as usize]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { map: inv }
    }

    /// `self^e` for any integer `e`, in time linear in `len` regardless of `e`.
    ///
    /// Each index moves `e mod L` steps along its cycle of length `L`, with the
    /// modulus taken in `0..L` so negative exponents walk backwards.
    pub fn power(&self, e: i64) -> Permutation {
        let len = self.len();
        let mut out = vec![0u32; len];
        let mut visited = vec![false; len];
        let mut cycle: Vec<u32> = Vec::new();
        for start in 0..len {
            if visited[start] {
                continue;
            }
            cycle.clear();
            let mut x = start as u32;
            while !visited[x as usize] {
                visited[x as usize] = true;
                cycle.push(x);
                x = self.map[x as usize];
            }
            let l = cycle.len();
            let shift = e.rem_euclid(l as i64) as usize;
            for (pos, &elem) in cycle.iter().enumerate() {
                let target = pos + shift;
                let target = if target >= l { target - l } else { target };
                out[elem as usize] = cycle[target];
            }
        }
        Permutation { map: out }
    }

    /// Disjoint cycles, each starting at its smallest element, ordered by
    /// that element.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut visited = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start as u32;
            while !visited[x as usize] {
                visited[x as usize] = true;
                cycle.push(x);
                x = self.map[x as usize];
            }
            out.push(cycle);
        }
        out
    }

    /// Calls `f(smallest_element, length)` once per cycle, without
    /// materializing the cycles.
    pub fn for_each_cycle(&self, mut f: impl FnMut(u32, u64)) {
        let mut visited = vec![false; self.len()];
        for start in 0..self.len() {
            if visited[start] {
                continue;
            }
            let mut x = start as u32;
            let mut l = 0u64;
            while !visited[x as usize] {
                visited[x as usize] = true;
                l += 1;
                x = self.map[x as usize];
            }
            f(start as u32, l);
        }
    }

    /// Cycle length -> number of cycles of that length.
    pub fn cycle_type(&self) -> BTreeMap<u64, u64> {
        let mut hist = BTreeMap::new();
        self.for_each_cycle(|_, l| *hist.entry(l).or_insert(0) += 1);
        hist
    }
}

pub fn permutation_power(p: &Permutation, e: i64) -> Permutation {
    p.power(e)
}
