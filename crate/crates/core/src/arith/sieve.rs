use serde::Serialize;

use crate::error::{ensure, Result};

/// Largest sieve limit accepted by [`SpfSieve::build`].
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

/// Smallest-prime-factor table for `1..=limit`.
///
/// Entries 0 and 1 hold the sentinel 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpfSieve {
    limit: u64,
    spf: Vec<u32>,
}

/// `n` with its canonical prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Builds from a factor list; primes must be strictly increasing with
    /// positive exponents (primality is the caller's responsibility).
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        ensure!(
            factors.windows(2).all(|w| w[0].0 < w[1].0),
            Domain,
            "primes must be strictly increasing"
        );
        ensure!(
            factors.iter().all(|&(p, v)| p >= 2 && v >= 1),
            Domain,
            "factors need p >= 2 and v >= 1"
        );
        let mut n = 1u64;
        for &(p, v) in &factors {
            for _ in 0..v {
                n = n
                    .checked_mul(p)
                    .ok_or_else(|| crate::Error::Domain("factored integer overflows u64".into()))?;
            }
        }
        Ok(Self { n, factors })
    }

    pub fn one() -> Self {
        Self {
            n: 1,
            factors: Vec::new(),
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        self.factors.iter().map(|&(_, v)| v)
    }
}

impl SpfSieve {
    /// Eratosthenes-style smallest-prime-factor sieve, `O(x log log x)`.
    pub fn build(limit: u64) -> Result<Self> {
        ensure!(limit >= 1, Domain, "sieve limit must be at least 1");
        ensure!(
            limit <= MAX_SIEVE_LIMIT,
            Resource,
            "sieve limit {limit} exceeds {MAX_SIEVE_LIMIT}"
        );
        let len = limit as usize + 1;
        let mut spf = vec![0u32; len];
        let mut p = 2usize;
        while p * p < len {
            if spf[p] == 0 {
                spf[p] = p as u32;
                let mut m = p * p;
                while m < len {
                    if spf[m] == 0 {
                        spf[m] = p as u32;
                    }
                    m += p;
                }
            }
            p += 1;
        }
        for (n, slot) in spf.iter_mut().enumerate().skip(2) {
            if *slot == 0 {
                *slot = n as u32;
            }
        }
        Ok(Self { limit, spf })
    }

    pub(crate) fn from_raw(limit: u64, spf: Vec<u32>) -> Result<Self> {
        ensure!(
            spf.len() as u64 == limit + 1,
            Integrity,
            "sieve table has {} entries, expected {}",
            spf.len(),
            limit + 1
        );
        ensure!(
            spf[0] == 0 && spf.get(1).is_none_or(|&s| s == 0),
            Integrity,
            "sieve sentinels corrupted"
        );
        Ok(Self { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn raw(&self) -> &[u32] {
        &self.spf
    }

    /// Smallest prime factor of `n` (0 for `n < 2`).
    pub fn spf(&self, n: u64) -> u32 {
        self.spf[n as usize]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.spf[n as usize] as u64 == n)
    }

    /// Canonical factorization of `1 <= n <= limit`.
    pub fn factorize(&self, n: u64) -> Result<FactoredInteger> {
        ensure!(
            n >= 1 && n <= self.limit,
            Domain,
            "{n} outside sieve range 1..={}",
            self.limit
        );
        Ok(self.factorize_unchecked(n))
    }

    pub(crate) fn factorize_unchecked(&self, n: u64) -> FactoredInteger {
        let mut factors = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut v = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                v += 1;
            }
            factors.push((p, v));
        }
        FactoredInteger { n, factors }
    }
}
