use rayon::prelude::*;

use crate::arith::{binomial_u128, SpfSieve};
use crate::dirichlet::gamma::gamma;
use crate::dirichlet::quadrature::TanhSinh;
use crate::error::{ensure, Error, Result};

/// Cap on `prod floor(x_j)`.
pub const LEMMA43_MAX_PRODUCT: u64 = 100_000_000;

/// Weighted divisor sum against its predicted main term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma43 {
    pub s: f64,
    pub main: f64,
    /// `(s - main) / main`.
    pub residual_ratio: f64,
}

/// `Gamma(1/k)^{-k} prod_j int_0^{log x_j} t^{1/k + 1} e^t dt`.
pub fn lemma43_main_term(x: &[f64]) -> Result<f64> {
    let k = x.len();
    ensure!(k >= 1, Domain, "need at least one coordinate");
    let a = 1.0 / k as f64;
    let quad = TanhSinh::new(1e-13, 0.0);
    let mut prod = 1.0;
    for &xj in x {
        let q = quad.integrate(0.0, xj.ln(), |t, _, _| t.powf(a + 1.0) * t.exp());
        ensure!(q.converged, Integrity, "main-term quadrature did not converge at x = {xj}");
        prod *= q.value;
    }
    Ok(prod / gamma(a).powi(k as i32))
}

/// `S(x_1, ..., x_k) = sum (log d_1)^2 ... (log d_k)^2 / tau_k(d_1 ... d_k)` over
/// `1 <= d_j <= x_j`, with its main term.
///
/// The sum is formed row by row: for each `d_1` in increasing order the
/// remaining indices are summed lexicographically, then the row sums are
/// added in order of `d_1`.
pub fn weighted_sum_s(x: &[f64], sieve: &SpfSieve) -> Result<Lemma43> {
    let k = x.len();
    ensure!((1..=8).contains(&k), Domain, "k = {k} outside 1..=8");
    ensure!(
        x.iter().all(|&v| v >= std::f64::consts::E - 1e-12 && v.is_finite()),
        Domain,
        "every x_j must be at least e"
    );
    let limits: Vec<u64> = x.iter().map(|&v| v.floor() as u64).collect();
    limits
        .iter()
        .try_fold(1u64, |acc, &l| acc.checked_mul(l))
        .filter(|&p| p <= LEMMA43_MAX_PRODUCT)
        .ok_or_else(|| Error::Resource(format!("prod floor(x_j) exceeds {LEMMA43_MAX_PRODUCT}")))?;
    let max = *limits.iter().max().unwrap_or(&1);
    ensure!(max <= sieve.limit(), Domain, "x_j = {max} exceeds the sieve limit {}", sieve.limit());

    let factors: Vec<Vec<(u64, u32)>> = (0..=max)
        .map(|d| {
            if d == 0 {
                Vec::new()
            } else {
                sieve.factorize_unchecked(d).factors().to_vec()
            }
        })
        .collect();
    let logsq: Vec<f64> = (0..=max)
        .map(|d| {
            let l = (d.max(1) as f64).ln();
            l * l
        })
        .collect();
    let max_v = 64 * k;
    let tau_local: Vec<f64> = (0..=max_v as u64)
        .map(|v| binomial_u128(v + k as u64 - 1, k as u64 - 1) as f64)
        .collect();

    let row = |d1: u64| -> f64 {
        let mut sum = 0.0;
        let mut idx = vec![1u64; k];
        idx[0] = d1;
        let mut merged: Vec<(u64, u32)> = Vec::new();
        loop {
            merged.clear();
            for &d in &idx {
                merged.extend_from_slice(&factors[d as usize]);
            }
            merged.sort_unstable_by_key(|&(p, _)| p);
            let mut tau = 1.0;
            let mut i = 0;
            while i < merged.len() {
                let p = merged[i].0;
                let mut v = 0u32;
                while i < merged.len() && merged[i].0 == p {
                    v += merged[i].1;
                    i += 1;
                }
                tau *= tau_local[v as usize];
            }
            let mut prod = 1.0;
            for &d in &idx {
                prod *= logsq[d as usize];
            }
            sum += prod / tau;
            // advance the trailing indices lexicographically
            let mut pos = k;
            loop {
                pos -= 1;
                if pos == 0 {
                    return sum;
                }
                if idx[pos] < limits[pos] {
                    idx[pos] += 1;
                    break;
                }
                idx[pos] = 1;
            }
        }
    };
    let rows: Vec<f64> = (1..=limits[0]).into_par_iter().map(row).collect();
    let s: f64 = rows.iter().fold(0.0, |acc, &r| acc + r);
    let main = lemma43_main_term(x)?;
    Ok(Lemma43 {
        s,
        main,
        residual_ratio: (s - main) / main,
    })
}
