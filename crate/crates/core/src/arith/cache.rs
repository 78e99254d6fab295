//! On-disk cache for smallest-prime-factor tables.
//!
//! Layout of `spf_<x>.bin`: the magic bytes `SPF1`, `x` as a little-endian
//! `u64`, then the table entries for `0..=x` as little-endian `u32` (entries
//! 0 and 1 are zero sentinels).

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::SpfSieve;
use crate::error::{Error, Result};

pub const SPF_MAGIC: &[u8; 4] = b"SPF1";

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "DIRLAW_CACHE";

pub fn spf_cache_path(dir: &Path, limit: u64) -> PathBuf {
    dir.join(format!("spf_{limit}.bin"))
}

/// Cache directory from `DIRLAW_CACHE`, created if absent.
pub fn cache_dir_from_env() -> Result<Option<PathBuf>> {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => {
            let dir = PathBuf::from(dir);
            fs::create_dir_all(&dir)?;
            Ok(Some(dir))
        }
        _ => Ok(None),
    }
}

pub fn write_spf(sieve: &SpfSieve, path: &Path) -> Result<()> {
    let tmp = path.with_extension("bin.tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        w.write_all(SPF_MAGIC)?;
        w.write_all(&sieve.limit().to_le_bytes())?;
        for &e in sieve.raw() {
            w.write_all(&e.to_le_bytes())?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_spf(path: &Path) -> Result<SpfSieve> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SPF_MAGIC {
        return Err(Error::Integrity(format!("{} is not an SPF1 file", path.display())));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let limit = u64::from_le_bytes(word);
    if limit > super::MAX_SIEVE_LIMIT {
        return Err(Error::Integrity(format!("cached limit {limit} exceeds the sieve cap")));
    }
    let mut bytes = Vec::with_capacity((limit as usize + 1) * 4);
    r.read_to_end(&mut bytes)?;
    if bytes.len() != (limit as usize + 1) * 4 {
        return Err(Error::Integrity(format!(
            "{} is truncated: {} payload bytes for limit {limit}",
            path.display(),
            bytes.len()
        )));
    }
    let spf = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    SpfSieve::from_raw(limit, spf)
}

/// Loads `spf_<limit>.bin` from `dir` if present, otherwise builds the sieve
/// and writes it there. With no directory this is a plain build.
pub fn load_or_build(limit: u64, dir: Option<&Path>) -> Result<SpfSieve> {
    let Some(dir) = dir else {
        return SpfSieve::build(limit);
    };
    let path = spf_cache_path(dir, limit);
    if path.exists() {
        if let Ok(s) = read_spf(&path) {
            if s.limit() == limit {
                return Ok(s);
            }
        }
    }
    let sieve = SpfSieve::build(limit)?;
    fs::create_dir_all(dir)?;
    write_spf(&sieve, &path)?;
    Ok(sieve)
}
