//! Monic irreducibles over `F_q` by a multiplication sieve, with an on-disk
//! cache.
//!
//! Layout of `irr_q<q>_d<max_deg>.bin`: the magic `IRR1`, `q` and `max_deg`
//! as little-endian `u32`, then for each degree `1..=max_deg` a little-endian
//! `u64` count followed by that many little-endian `u64` codes.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::poly::{divrem_monic, mul_coeffs, FactoredPoly, PolyQ};
use crate::error::{ensure, Error, Result};

pub const IRR_MAGIC: &[u8; 4] = b"IRR1";

/// Largest prime field supported by the tables.
pub const MAX_TABLE_Q: u32 = 13;

/// Cap on `q^max_deg`.
pub const MAX_TABLE_SIZE: u64 = 100_000_000;

/// Monic irreducibles of each degree `1..=max_deg`, as sorted base-`q` codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreducibleTable {
    q: u32,
    max_deg: u32,
    by_degree: Vec<Vec<u64>>,
}

fn mobius(mut n: u64) -> i64 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// `(1/d) sum_{e | d} mu(e) q^(d/e)`.
pub fn necklace_count(q: u64, d: u32) -> u64 {
    let d = d as u64;
    let total: i128 = (1..=d)
        .filter(|e| d.is_multiple_of(*e))
        .map(|e| mobius(e) as i128 * (q as i128).pow((d / e) as u32))
        .sum();
    (total / d as i128) as u64
}

fn digits(code: u64, q: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut c = code;
    while c > 0 {
        out.push((c % q as u64) as u32);
        c /= q as u64;
    }
    out
}

fn code_of(coeffs: &[u32], q: u32) -> u64 {
    coeffs.iter().rev().fold(0u64, |acc, &c| acc * q as u64 + c as u64)
}

fn check_q(q: u32) -> Result<()> {
    ensure!(
        [2, 3, 5, 7, 11, 13].contains(&q),
        Domain,
        "q = {q} must be a prime <= {MAX_TABLE_Q}"
    );
    Ok(())
}

impl IrreducibleTable {
    /// Sieve by increasing degree: every product `P * Q` with `P` irreducible
    /// of degree `e <= d/2` and `Q` monic of degree `d - e` is marked
    /// composite, and the unmarked monic polynomials of degree `d` are the
    /// irreducibles. Counts are checked against the necklace formula.
    pub fn build(q: u32, max_deg: u32) -> Result<Self> {
        check_q(q)?;
        ensure!(max_deg >= 1, Domain, "max_deg must be at least 1");
        ensure!(
            (q as u64).checked_pow(max_deg).is_some_and(|s| s <= MAX_TABLE_SIZE),
            Resource,
            "q^max_deg = {q}^{max_deg} exceeds {MAX_TABLE_SIZE}"
        );
        let qq = q as u64;
        let mut by_degree: Vec<Vec<u64>> = vec![Vec::new(); max_deg as usize + 1];
        for d in 1..=max_deg {
            let size = qq.pow(d) as usize;
            // composite[i]: the monic polynomial with code q^d + i is reducible
            let mut composite = vec![false; size];
            for e in 1..=d / 2 {
                let rest = d - e;
                let base = qq.pow(rest);
                for &pc in &by_degree[e as usize] {
                    let pd = digits(pc, q);
                    for off in 0..base {
                        let qd = digits(base + off, q);
                        let prod = mul_coeffs(&pd, &qd, q);
                        composite[(code_of(&prod, q) - qq.pow(d)) as usize] = true;
                    }
                }
            }
            let start = qq.pow(d);
            by_degree[d as usize] = (0..size as u64)
                .filter(|&i| !composite[i as usize])
                .map(|i| start + i)
                .collect();
        }
        let table = Self {
            q,
            max_deg,
            by_degree,
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        for d in 1..=self.max_deg {
            let got = self.by_degree[d as usize].len() as u64;
            let want = necklace_count(self.q as u64, d);
            ensure!(
                got == want,
                Integrity,
                "q = {}: {got} irreducibles of degree {d}, necklace formula gives {want}",
                self.q
            );
        }
        Ok(())
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn max_deg(&self) -> u32 {
        self.max_deg
    }

    /// Codes of the monic irreducibles of degree `d`, ascending.
    pub fn degree(&self, d: u32) -> &[u64] {
        self.by_degree.get(d as usize).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, d: u32) -> usize {
        self.degree(d).len()
    }

    /// Factors a monic `f` by trial division in (degree, code) order. The
    /// table must reach `deg f / 2`; a cofactor left over when no table entry
    /// of degree at most half its degree divides it is irreducible.
    pub fn factor(&self, f: &PolyQ) -> Result<FactoredPoly> {
        ensure!(f.q() == self.q, Domain, "polynomial over F_{}, table over F_{}", f.q(), self.q);
        ensure!(f.is_monic(), Domain, "factorization needs a monic polynomial");
        let deg = f.degree().unwrap_or(0) as u32;
        ensure!(
            self.max_deg >= deg / 2,
            Domain,
            "table reaches degree {}, factoring degree {deg} needs {}",
            self.max_deg,
            deg / 2
        );
        let mut rest = f.coeffs().to_vec();
        let mut factors = Vec::new();
        'outer: for e in 1..=self.max_deg {
            for &pc in self.degree(e) {
                if rest.len() - 1 < 2 * e as usize {
                    break 'outer;
                }
                let p = digits(pc, self.q);
                let mut mult = 0u32;
                loop {
                    let mut r = rest.clone();
                    let quot = divrem_monic(&mut r, &p, self.q);
                    if !r.is_empty() {
                        break;
                    }
                    rest = quot;
                    mult += 1;
                }
                if mult > 0 {
                    factors.push((PolyQ::from_trimmed(self.q, p), mult));
                }
            }
        }
        if rest.len() > 1 {
            factors.push((PolyQ::from_trimmed(self.q, rest), 1));
            factors.sort();
        }
        Ok(FactoredPoly {
            poly: f.clone(),
            factors,
        })
    }

    /// Factorization keyed by degree and exponent only, for the hot loop of
    /// the left-hand side: pushes `(degree, exponent)` pairs into `out`.
    pub(crate) fn factor_shape(&self, coeffs: &[u32], out: &mut Vec<(u32, u32)>) {
        out.clear();
        let mut rest = coeffs.to_vec();
        let mut scratch = Vec::with_capacity(rest.len());
        let mut p = Vec::with_capacity(rest.len());
        'outer: for e in 1..=self.max_deg {
            for &pc in self.degree(e) {
                if rest.len() - 1 < 2 * e as usize {
                    break 'outer;
                }
                p.clear();
                let mut c = pc;
                while c > 0 {
                    p.push((c % self.q as u64) as u32);
                    c /= self.q as u64;
                }
                let mut mult = 0u32;
                loop {
                    scratch.clear();
                    scratch.extend_from_slice(&rest);
                    let quot = divrem_monic(&mut scratch, &p, self.q);
                    if !scratch.is_empty() {
                        break;
                    }
                    rest = quot;
                    mult += 1;
                }
                if mult > 0 {
                    out.push((e, mult));
                }
            }
        }
        if rest.len() > 1 {
            out.push((rest.len() as u32 - 1, 1));
        }
    }
}

pub fn irr_cache_path(dir: &Path, q: u32, max_deg: u32) -> PathBuf {
    dir.join(format!("irr_q{q}_d{max_deg}.bin"))
}

pub fn write_irr(table: &IrreducibleTable, path: &Path) -> Result<()> {
    let tmp = path.with_extension("bin.tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        w.write_all(IRR_MAGIC)?;
        w.write_all(&table.q.to_le_bytes())?;
        w.write_all(&table.max_deg.to_le_bytes())?;
        for d in 1..=table.max_deg {
            let codes = table.degree(d);
            w.write_all(&(codes.len() as u64).to_le_bytes())?;
            for c in codes {
                w.write_all(&c.to_le_bytes())?;
            }
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_irr(path: &Path) -> Result<IrreducibleTable> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let bad = |what: &str| Error::Integrity(format!("{}: {what}", path.display()));
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != IRR_MAGIC {
        return Err(bad("not an IRR1 file"));
    }
    let mut w4 = [0u8; 4];
    r.read_exact(&mut w4)?;
    let q = u32::from_le_bytes(w4);
    r.read_exact(&mut w4)?;
    let max_deg = u32::from_le_bytes(w4);
    check_q(q).map_err(|_| bad("bad field size"))?;
    ensure!(
        (q as u64).checked_pow(max_deg).is_some_and(|s| s <= MAX_TABLE_SIZE),
        Integrity,
        "{}: degree {max_deg} out of range",
        path.display()
    );
    let mut by_degree = vec![Vec::new()];
    let mut w8 = [0u8; 8];
    for d in 1..=max_deg {
        r.read_exact(&mut w8)?;
        let count = u64::from_le_bytes(w8);
        ensure!(
            count == necklace_count(q as u64, d),
            Integrity,
            "{}: wrong count at degree {d}",
            path.display()
        );
        let mut codes = Vec::with_capacity(count as usize);
        for _ in 0..count {
            r.read_exact(&mut w8)?;
            codes.push(u64::from_le_bytes(w8));
        }
        by_degree.push(codes);
    }
    let table = IrreducibleTable {
        q,
        max_deg,
        by_degree,
    };
    table.validate()?;
    Ok(table)
}

/// Loads `irr_q<q>_d<max_deg>.bin` from `dir` if present and valid,
/// otherwise builds the table and writes it there.
pub fn load_or_build_irr(q: u32, max_deg: u32, dir: Option<&Path>) -> Result<IrreducibleTable> {
    let Some(dir) = dir else {
        return IrreducibleTable::build(q, max_deg);
    };
    let path = irr_cache_path(dir, q, max_deg);
    if let Ok(t) = read_irr(&path) {
        if t.q == q && t.max_deg == max_deg {
            return Ok(t);
        }
    }
    let table = IrreducibleTable::build(q, max_deg)?;
    fs::create_dir_all(dir)?;
    write_irr(&table, &path)?;
    Ok(table)
}
