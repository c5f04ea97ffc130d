//! On-disk torsion table cache.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "KTOR"  version:u8 = 1
//! m:i64  n:i64  k_max:u32
//! for k in 1..=k_max: 2^k x u32 of C(m, -), then 2^k x u32 of C(n, -)
//! sha256 of every preceding byte (32 bytes)
//! ```
//!
//! Readers check the header, the exact file size, that every level is a
//! permutation, and the trailing digest, in that order.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::packed::MAX_WORD_LEN;
use crate::perm::find_defect;
use crate::torsion::TorsionTable;

pub const MAGIC: &[u8; 4] = b"KTOR";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 4 + 1 + 8 + 8 + 4;
pub const DIGEST_LEN: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheHeader {
    pub m: i64,
    pub n: i64,
    pub k_max: u32,
}

/// Total file size for a table with the given `k_max`.
pub fn file_len(k_max: u32) -> usize {
    let entries = 2 * ((1usize << (k_max + 1)) - 2);
    HEADER_LEN + 4 * entries + DIGEST_LEN
}

pub fn to_bytes(table: &TorsionTable) -> Vec<u8> {
    let k_max = table.k_max();
    let mut out = Vec::with_capacity(file_len(k_max));
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&table.alphabet().m().to_le_bytes());
    out.extend_from_slice(&table.alphabet().n().to_le_bytes());
    out.extend_from_slice(&k_max.to_le_bytes());
    for k in 1..=k_max {
        for letter in [Letter::M, Letter::N] {
            let level = table.level(letter, k).expect("level within k_max");
            for &v in level.as_slice() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

pub fn read_header(bytes: &[u8]) -> Result<CacheHeader> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::CacheFormat(format!(
            "truncated header ({} bytes)",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::CacheFormat("bad magic bytes".into()));
    }
    if bytes[4] != VERSION {
        return Err(Error::CacheFormat(format!(
            "unsupported format version {}",
            bytes[4]
        )));
    }
    let m = i64::from_le_bytes(bytes[5..13].try_into().expect("8 bytes"));
    let n = i64::from_le_bytes(bytes[13..21].try_into().expect("8 bytes"));
    let k_max = u32::from_le_bytes(bytes[21..25].try_into().expect("4 bytes"));
    Ok(CacheHeader { m, n, k_max })
}

pub fn from_bytes(bytes: &[u8]) -> Result<TorsionTable> {
    let header = read_header(bytes)?;
    let alphabet = Alphabet::new(header.m, header.n)?;
    if !(1..=MAX_WORD_LEN).contains(&header.k_max) {
        return Err(Error::KMaxOutOfRange(header.k_max));
    }
    let expected = file_len(header.k_max);
    if bytes.len() != expected {
        return Err(Error::CacheFormat(format!(
            "expected {expected} bytes for k_max = {}, found {}",
            header.k_max,
            bytes.len()
        )));
    }

    let mut offset = HEADER_LEN;
    let mut levels_m = Vec::with_capacity(header.k_max as usize);
    let mut levels_n = Vec::with_capacity(header.k_max as usize);
    for k in 1..=header.k_max {
        for letter in [Letter::M, Letter::N] {
            let size = 1usize << k;
            let level: Vec<u32> = bytes[offset..offset + 4 * size]
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
                .collect();
            offset += 4 * size;
            if let Some(index) = find_defect(&level) {
                return Err(Error::LevelNotPermutation { letter, k, index });
            }
            match letter {
                Letter::M => levels_m.push(level),
                Letter::N => levels_n.push(level),
            }
        }
    }

    let digest = Sha256::digest(&bytes[..offset]);
    if digest.as_slice() != &bytes[offset..] {
        return Err(Error::ChecksumMismatch);
    }
    TorsionTable::from_levels(alphabet, levels_m, levels_n)
}

pub fn save(table: &TorsionTable, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("ktor.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&to_bytes(table))?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TorsionTable> {
    from_bytes(&fs::read(path)?)
}

/// Canonical file name for an alphabet inside a cache directory.
pub fn cache_path(dir: &Path, alphabet: &Alphabet) -> PathBuf {
    dir.join(format!("m{}_n{}.ktor", alphabet.m(), alphabet.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::build_tables;

    #[test]
    fn round_trip() {
        let table = build_tables(Alphabet::new(-1, 6).unwrap(), 6).unwrap();
        let bytes = to_bytes(&table);
        assert_eq!(bytes.len(), file_len(6));
        assert_eq!(from_bytes(&bytes).unwrap(), table);
        assert_eq!(
            read_header(&bytes).unwrap(),
            CacheHeader {
                m: -1,
                n: 6,
                k_max: 6
            }
        );
    }

    #[test]
    fn header_layout() {
        let table = build_tables(Alphabet::new(1, 2).unwrap(), 1).unwrap();
        let bytes = to_bytes(&table);
        let mut want = b"KTOR\x01".to_vec();
        want.extend_from_slice(&1i64.to_le_bytes());
        want.extend_from_slice(&2i64.to_le_bytes());
        want.extend_from_slice(&1u32.to_le_bytes());
        for _ in 0..2 {
            want.extend_from_slice(&1u32.to_le_bytes());
            want.extend_from_slice(&0u32.to_le_bytes());
        }
        assert_eq!(&bytes[..want.len()], &want[..]);
        assert_eq!(bytes.len(), want.len() + DIGEST_LEN);
    }

    #[test]
    fn every_single_bit_flip_is_rejected() {
        let table = build_tables(Alphabet::new(1, 2).unwrap(), 4).unwrap();
        let bytes = to_bytes(&table);
        for bit in 0..bytes.len() * 8 {
            let mut corrupt = bytes.clone();
            corrupt[bit / 8] ^= 1 << (bit % 8);
            assert!(from_bytes(&corrupt).is_err(), "bit {bit} accepted");
        }
    }

    #[test]
    fn entry_corruption_names_the_level() {
        let table = build_tables(Alphabet::new(1, 2).unwrap(), 3).unwrap();
        let mut bytes = to_bytes(&table);
        // first entry of C(n, -) at k = 2
        let offset = HEADER_LEN + 4 * (2 + 2 + 4);
        bytes[offset] ^= 1;
        assert!(matches!(
            from_bytes(&bytes),
            Err(Error::LevelNotPermutation {
                letter: Letter::N,
                k: 2,
                ..
            })
        ));
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let a = Alphabet::new(1, 4).unwrap();
        let table = build_tables(a, 5).unwrap();
        let path = cache_path(dir.path(), &a);
        save(&table, &path).unwrap();
        assert_eq!(load(&path).unwrap(), table);
        assert!(path.ends_with("m1_n4.ktor"));
    }
}
