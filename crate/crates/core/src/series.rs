//! The multiple Dirichlet series
//! `D(s_1, ..., s_k) = sum tau_k(n_1 ... n_k)^{-1} n_1^{-s_1} ... n_k^{-s_k}`:
//! truncated direct sums and Euler products, each with a certified bound on
//! the truncation error, plus the local checks behind its leading
//! coefficient and the prime-sum diagnostic of a weight model.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{binomial, compositions, FactoredInteger, SpfSieve, WeightModel};
use crate::error::{ensure, Result};

/// Largest truncation point of [`d_direct`].
pub const MAX_DIRECT_N: u64 = 100_000;

/// Cap on `N^k`, the number of terms of [`d_direct`].
pub const MAX_DIRECT_TERMS: f64 = 2e9;

/// Cap on `(V + 1)^k` times the number of primes in [`d_euler`].
pub const MAX_EULER_TERMS: f64 = 2e10;

/// Smallest real part accepted by [`d_direct`].
pub const DIRECT_MIN_SIGMA: f64 = 1.5;

/// Cut-off of the partial sums used for upper bounds on `zeta(sigma)`.
const ZETA_TERMS: u64 = 1000;

/// A point `(s_1, ..., s_k)` with every `Re s_j > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    s: Vec<Complex64>,
}

impl SeriesPoint {
    pub fn new(s: Vec<Complex64>) -> Result<Self> {
        ensure!(!s.is_empty(), Domain, "series point needs at least one coordinate");
        ensure!(
            s.iter().all(|z| z.re > 1.0 && z.is_finite()),
            Domain,
            "every real part must exceed 1"
        );
        Ok(Self { s })
    }

    /// All coordinates real and equal to `sigma`.
    pub fn real(k: usize, sigma: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(sigma, 0.0); k])
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.s
    }

    fn sigmas(&self) -> Vec<f64> {
        self.s.iter().map(|z| z.re).collect()
    }
}

/// A truncated value with a bound on `|value - D(s)|` from truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Upper bound for `zeta(sigma)`: partial sum plus the integral remainder.
pub fn zeta_upper(sigma: f64) -> f64 {
    let partial: f64 = (1..=ZETA_TERMS).map(|n| (n as f64).powf(-sigma)).sum();
    partial + (ZETA_TERMS as f64).powf(1.0 - sigma) / (sigma - 1.0)
}

fn inverse_tau_factors(k: usize, max_v: usize) -> Vec<f64> {
    (0..=max_v)
        .map(|v| {
            1.0 / binomial((v + k - 1) as u64, k as u64 - 1).to_f64().unwrap_or(f64::INFINITY)
        })
        .collect()
}

fn merge(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

/// `1 / tau_k(a b)` from the factorizations of `a` and `b`.
fn inverse_tau_product(a: &[(u64, u32)], b: &[(u64, u32)], inv: &[f64]) -> f64 {
    let (mut i, mut j, mut w) = (0, 0, 1.0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            w *= inv[a[i].1 as usize];
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            w *= inv[b[j].1 as usize];
            j += 1;
        } else {
            w *= inv[(a[i].1 + b[j].1) as usize];
            i += 1;
            j += 1;
        }
    }
    w
}

/// Sum over `1 <= n_j <= N`. The tail bound is
/// `sum_j prod_{i != j} zeta(sigma_i) N^{1 - sigma_j} / (sigma_j - 1)`
/// (every term has modulus at most `prod n_j^{-sigma_j}`).
pub fn d_direct(s: &SeriesPoint, n_max: u64, sieve: &SpfSieve) -> Result<SeriesValue> {
    let k = s.k();
    let sig = s.sigmas();
    ensure!(
        sig.iter().all(|&x| x >= DIRECT_MIN_SIGMA),
        Domain,
        "direct summation needs every real part >= {DIRECT_MIN_SIGMA}"
    );
    ensure!((1..=MAX_DIRECT_N).contains(&n_max), Domain, "N must lie in 1..={MAX_DIRECT_N}");
    ensure!(
        (n_max as f64).powi(k as i32) <= MAX_DIRECT_TERMS,
        Resource,
        "N^k exceeds {MAX_DIRECT_TERMS:e} terms"
    );
    ensure!(sieve.limit() >= n_max, Domain, "sieve limit {} below N = {n_max}", sieve.limit());

    let factors: Vec<Vec<(u64, u32)>> = (0..=n_max)
        .map(|n| {
            if n == 0 {
                Vec::new()
            } else {
                sieve.factorize_unchecked(n).factors().to_vec()
            }
        })
        .collect();
    let max_v = k * (64 - n_max.leading_zeros() as usize);
    let inv = inverse_tau_factors(k, max_v);
    let powers: Vec<Vec<Complex64>> = s
        .coords()
        .iter()
        .map(|z| {
            (0..=n_max)
                .map(|n| if n == 0 { Complex64::zero() } else { (-z * (n as f64).ln()).exp() })
                .collect()
        })
        .collect();

    fn rec(
        j: usize,
        acc: &[(u64, u32)],
        weight: Complex64,
        factors: &[Vec<(u64, u32)>],
        powers: &[Vec<Complex64>],
        inv: &[f64],
    ) -> Complex64 {
        let n_max = factors.len() - 1;
        if j + 1 == powers.len() {
            let mut sum = Complex64::zero();
            for n in 1..=n_max {
                sum += powers[j][n] * inverse_tau_product(acc, &factors[n], inv);
            }
            return weight * sum;
        }
        let mut sum = Complex64::zero();
        for n in 1..=n_max {
            let merged = merge(acc, &factors[n]);
            sum += rec(j + 1, &merged, weight * powers[j][n], factors, powers, inv);
        }
        sum
    }

    let value = if k == 1 {
        rec(0, &[], Complex64::one(), &factors, &powers, &inv)
    } else {
        let parts: Vec<Complex64> = (1..=n_max as usize)
            .into_par_iter()
            .map(|n| rec(1, &factors[n], powers[0][n], &factors, &powers, &inv))
            .collect();
        parts.into_iter().fold(Complex64::zero(), |a, b| a + b)
    };

    let zeta: Vec<f64> = sig.iter().map(|&x| zeta_upper(x)).collect();
    let tail_bound = (0..k)
        .map(|j| {
            let others: f64 = (0..k).filter(|&i| i != j).map(|i| zeta[i]).product();
            others * (n_max as f64).powf(1.0 - sig[j]) / (sig[j] - 1.0)
        })
        .sum();
    Ok(SeriesValue { value, tail_bound })
}

/// `sum_{v in [0, V]^k} C(|v| + k - 1, k - 1)^{-1} p^{-sum v_j s_j}`.
fn euler_factor(log_p: f64, s: &[Complex64], v_max: u32, inv: &[f64]) -> Complex64 {
    let steps: Vec<Complex64> = s.iter().map(|z| (-z * log_p).exp()).collect();
    fn rec(j: usize, total: usize, pw: Complex64, steps: &[Complex64], v_max: u32, inv: &[f64]) -> Complex64 {
        if j == steps.len() {
            return pw * inv[total];
        }
        let mut sum = Complex64::zero();
        let mut cur = pw;
        for v in 0..=v_max as usize {
            sum += rec(j + 1, total + v, cur, steps, v_max, inv);
            cur *= steps[j];
        }
        sum
    }
    rec(0, 0, Complex64::one(), &steps, v_max, inv)
}

/// Euler product over `p <= P` with local exponents `v_j <= V`.
///
/// With `A_p = prod_j (1 - p^{-sigma_j})^{-1}` and `Z = prod_{p <= P} A_p`, the
/// tail bound is `Z (exp(S) - 1) + Z sum_{p <= P} sum_j p^{-(V+1) sigma_j}`,
/// where `S` bounds `sum_{p > P} (A_p - 1)`.
pub fn d_euler(s: &SeriesPoint, p_max: u64, v_max: u32) -> Result<SeriesValue> {
    let k = s.k();
    let sig = s.sigmas();
    let primes: Vec<u64> = if p_max >= 2 {
        SpfSieve::build(p_max)?.primes().collect()
    } else {
        Vec::new()
    };
    ensure!(
        (v_max as f64 + 1.0).powi(k as i32) * primes.len() as f64 <= MAX_EULER_TERMS,
        Resource,
        "Euler product needs more than {MAX_EULER_TERMS:e} terms"
    );
    let inv = inverse_tau_factors(k, k * v_max as usize);
    let factors: Vec<(Complex64, f64, f64)> = primes
        .par_iter()
        .map(|&p| {
            let lp = (p as f64).ln();
            let a_p: f64 = sig.iter().map(|&x| 1.0 / (1.0 - (-x * lp).exp())).product();
            let delta: f64 = sig.iter().map(|&x| (-(v_max as f64 + 1.0) * x * lp).exp()).sum();
            (euler_factor(lp, s.coords(), v_max, &inv), a_p, delta)
        })
        .collect();
    let mut value = Complex64::one();
    let mut z = 1.0f64;
    let mut delta_sum = 0.0f64;
    for (e, a, d) in factors {
        value *= e;
        z *= a;
        delta_sum += d;
    }

    // sum_{n > P} (prod_j (1 - n^{-sigma_j})^{-1} - 1) <= e^{z0} c sum_j P^{1-sigma_j}/(sigma_j - 1)
    let p_eff = p_max.max(1) as f64;
    let min_sig = sig.iter().cloned().fold(f64::INFINITY, f64::min);
    let c = 1.0 / (1.0 - (p_eff + 1.0).powf(-min_sig));
    let z0 = c * sig.iter().map(|&x| (p_eff + 1.0).powf(-x)).sum::<f64>();
    let tail_sum = z0.exp() * c * sig.iter().map(|&x| p_eff.powf(1.0 - x) / (x - 1.0)).sum::<f64>();
    let tail_bound = z * tail_sum.exp_m1() + z * delta_sum;
    Ok(SeriesValue { value, tail_bound })
}

/// `(1 - 1/p) sum_{v <= V} p^{-v} sum_{c in comp(v, k)} C(v + k - 1, k - 1)^{-1}`
/// with the compositions counted by enumeration. The inner sum is 1, so the
/// result is `1 - p^{-(V+1)}`.
pub fn a0_local_check(p: u64, k: usize, v_max: u32) -> Result<BigRational> {
    ensure!(p >= 2, Domain, "p must be at least 2");
    ensure!((1..=8).contains(&k), Domain, "k = {k} outside 1..=8");
    ensure!(v_max <= 64, Domain, "V = {v_max} exceeds 64");
    let p_big = BigInt::from(p);
    let mut sum = BigRational::zero();
    let mut p_pow = BigInt::one();
    for v in 0..=v_max {
        let weight = BigRational::new(BigInt::one(), BigInt::from(binomial(v as u64 + k as u64 - 1, k as u64 - 1)));
        let count = BigInt::from(compositions(v, k).len() / k);
        sum += weight * BigRational::new(count, p_pow.clone());
        p_pow *= &p_big;
    }
    Ok(sum * BigRational::new(p_big.clone() - 1, p_big))
}

/// `sum_{p <= P} (F(1, ..., p, ..., 1) - alpha_j) p^{-s}`, prime in coordinate
/// `j` (0-based), summed in increasing prime order.
pub fn prime_sum_diag(model: &WeightModel, j: usize, s: Complex64, p_max: u64) -> Result<Complex64> {
    ensure!(s.re > 1.0, Domain, "Re s must exceed 1");
    ensure!(j < model.k(), Domain, "coordinate {j} outside 0..{}", model.k());
    let alpha = model.predicted_alpha()[j];
    if p_max < 2 {
        return Ok(Complex64::zero());
    }
    let sieve = SpfSieve::build(p_max)?;
    let mut sum = Complex64::zero();
    for p in sieve.primes() {
        let diff = model.coordinate_value(p, 1, j) - alpha;
        if diff != 0.0 {
            sum += diff * (-s * (p as f64).ln()).exp();
        }
    }
    Ok(sum)
}

/// `1 / tau_k(n)`.
pub fn inverse_tau(n: &FactoredInteger, k: usize) -> f64 {
    let max_v = n.exponents().max().unwrap_or(0) as usize;
    let inv = inverse_tau_factors(k, max_v);
    n.exponents().map(|v| inv[v as usize]).product()
}
