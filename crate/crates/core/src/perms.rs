//! Permutations of `{1, ..., n}` split into `k` ordered blocks, each a union
//! of cycles: Stirling numbers, the mean of `tau_alpha(sigma) = alpha^c(sigma)`,
//! and the block-size law by closed formula and by cycle-type enumeration.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::dirichlet::{cdf_on_grid, DirichletParams};
use crate::error::{ensure, Error, Result};
use crate::grid::{DeviationReport, DeviationRow, RectGrid, RectQuery};
use crate::scalar::Scalar;

/// Largest `n` for the closed-form left-hand side.
pub const MAX_PERM_N: u64 = 5000;

/// Largest `n` for the cycle-type enumeration.
pub const MAX_BRUTE_N: u64 = 40;

/// Cap on the number of terms of the closed-form sum.
pub const MAX_PERM_TERMS: u128 = 100_000_000;

/// Above this `n` the floating-point path of [`deviation_perm`] is used.
pub const EXACT_PERM_LIMIT: u64 = 300;

/// Unsigned Stirling numbers of the first kind `[n k]` for `n <= max_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StirlingTable {
    max_n: usize,
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    /// `[n+1, k] = n [n, k] + [n, k-1]`.
    pub fn build(max_n: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for n in 0..max_n {
            let prev = &rows[n];
            let mut row = vec![BigUint::zero(); n + 2];
            for (k, slot) in row.iter_mut().enumerate() {
                if k <= n {
                    *slot += &prev[k] * n;
                }
                if k >= 1 {
                    *slot += &prev[k - 1];
                }
            }
            rows.push(row);
        }
        Self { max_n, rows }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn get(&self, n: usize, k: usize) -> Result<&BigUint> {
        ensure!(n <= self.max_n, Domain, "n = {n} beyond table size {}", self.max_n);
        ensure!(k <= n, Domain, "[{n} {k}] needs k <= n");
        Ok(&self.rows[n][k])
    }

    pub fn row(&self, n: usize) -> Result<&[BigUint]> {
        ensure!(n <= self.max_n, Domain, "n = {n} beyond table size {}", self.max_n);
        Ok(&self.rows[n])
    }
}

pub fn stirling_first(n: usize, k: usize, table: &StirlingTable) -> Result<BigUint> {
    table.get(n, k).cloned()
}

fn big(r: &Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `(1/n!) sum_sigma alpha^c(sigma) = C(n + alpha - 1, n)`.
///
/// Both sides are computed (the binomial as `prod (alpha + j - 1)/j`, the
/// mean through Stirling numbers) and must agree exactly.
pub fn mean_tau_alpha(n: usize, alpha: Rational64, table: &StirlingTable) -> Result<BigRational> {
    ensure!(alpha > Rational64::zero(), Domain, "alpha must be positive");
    let row = table.row(n)?;
    let a = big(&alpha);
    let mut binom = BigRational::one();
    for j in 1..=n {
        binom = binom * (a.clone() + BigRational::from_integer((j as i64 - 1).into()))
            / BigRational::from_integer((j as i64).into());
    }
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    for s in row {
        sum += BigRational::from_integer(BigInt::from(s.clone())) * power.clone();
        power *= a.clone();
    }
    let mean = sum / BigRational::from_integer(BigInt::from(factorial(n as u64)));
    if mean != binom {
        return Err(Error::Integrity(format!(
            "mean of tau_alpha over S_{n} is {mean}, binomial gives {binom}"
        )));
    }
    Ok(binom)
}

fn caps(n: u64, k: usize, rect: &RectQuery) -> Result<Vec<u64>> {
    ensure!((2..=6).contains(&k), Domain, "k = {k} outside 2..=6");
    ensure!(rect.dim() + 1 == k, Domain, "rect has {} coordinates, expected {}", rect.dim(), k - 1);
    Ok(rect.floor_scaled(n).into_iter().map(|c| c.min(n)).collect())
}

/// Calls `visit(m)` for every `(m_1, ..., m_{k-1})` with `m_i <= caps[i]` and
/// `sum m_i <= n`, in lexicographic order.
fn for_each_block_sizes(n: u64, caps: &[u64], visit: &mut impl FnMut(&[u64])) {
    fn rec(i: usize, left: u64, caps: &[u64], m: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
        if i == caps.len() {
            visit(m);
            return;
        }
        for v in 0..=caps[i].min(left) {
            m.push(v);
            rec(i + 1, left - v, caps, m, visit);
            m.pop();
        }
    }
    rec(0, n, caps, &mut Vec::with_capacity(caps.len()), visit);
}

fn term_count(n: u64, caps: &[u64]) -> u128 {
    caps.iter().map(|&c| c.min(n) as u128 + 1).product()
}

/// `sum prod_{i=1}^k C(m_i + 1/k - 1, m_i)` over `m_i <= floor(n u_i)` for
/// `i < k` and `m_k = n - sum m_i >= 0`: the probability that a uniform
/// permutation with a uniform `sigma`-invariant decomposition into `k` blocks
/// has `|A_i| <= n u_i` for `i < k`.
///
/// Exact scalars use big integers throughout
/// (`C(m + 1/k - 1, m) = prod_{j<=m} (1 + k(j-1)) / (k^m m!)`); floating
/// scalars use the ratio recurrence of the binomials in `f64`.
pub fn lhs_perm_exact<S: Scalar>(n: u64, k: usize, rect: &RectQuery) -> Result<S> {
    ensure!(n <= MAX_PERM_N, Resource, "n = {n} exceeds {MAX_PERM_N}");
    let caps = caps(n, k, rect)?;
    ensure!(
        term_count(n, &caps) <= MAX_PERM_TERMS,
        Resource,
        "closed form needs more than {MAX_PERM_TERMS} terms"
    );
    if S::EXACT {
        let kk = k as u64;
        let mut a = vec![BigUint::one()];
        for j in 1..=n {
            let next = &a[j as usize - 1] * (1 + kk * (j - 1));
            a.push(next);
        }
        let fact: Vec<BigUint> = {
            let mut f = vec![BigUint::one()];
            for j in 1..=n {
                let next = &f[j as usize - 1] * j;
                f.push(next);
            }
            f
        };
        let mut sum = BigUint::zero();
        for_each_block_sizes(n, &caps, &mut |m| {
            let last = n - m.iter().sum::<u64>();
            let mut num = &a[last as usize] * &fact[n as usize] / &fact[last as usize];
            for &mi in m {
                num = num * &a[mi as usize] / &fact[mi as usize];
            }
            sum += num;
        });
        let den = BigUint::from(kk).pow(n as u32) * &fact[n as usize];
        Ok(S::from_biguint(&sum) / S::from_biguint(&den))
    } else {
        let c = binomial_ratios_f64(n, k);
        let mut sum = 0.0f64;
        for_each_block_sizes(n, &caps, &mut |m| {
            let last = n - m.iter().sum::<u64>();
            sum += m.iter().fold(c[last as usize], |acc, &mi| acc * c[mi as usize]);
        });
        Ok(S::approx_from_f64(sum))
    }
}

/// `C(m + 1/k - 1, m)` for `m = 0..=n`.
fn binomial_ratios_f64(n: u64, k: usize) -> Vec<f64> {
    let a = 1.0 / k as f64;
    let mut c = Vec::with_capacity(n as usize + 1);
    c.push(1.0);
    for m in 1..=n {
        let prev = c[m as usize - 1];
        c.push(prev * (a + m as f64 - 1.0) / m as f64);
    }
    c
}

/// Cycle type of a permutation: `(length, multiplicity)` pairs, lengths
/// ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleType {
    pub n: u64,
    pub parts: Vec<(u64, u64)>,
}

impl CycleType {
    pub fn cycles(&self) -> u64 {
        self.parts.iter().map(|&(_, c)| c).sum()
    }

    /// Number of permutations of this type, `n! / prod l^c c!`.
    pub fn class_size(&self) -> BigUint {
        let den = self.parts.iter().fold(BigUint::one(), |acc, &(l, c)| {
            acc * BigUint::from(l).pow(c as u32) * factorial(c)
        });
        factorial(self.n) / den
    }

    /// All cycle types of `S_n`.
    pub fn all(n: u64) -> Vec<CycleType> {
        fn rec(left: u64, max: u64, cur: &mut Vec<(u64, u64)>, out: &mut Vec<Vec<(u64, u64)>>) {
            if left == 0 {
                let mut parts = cur.clone();
                parts.reverse();
                out.push(parts);
                return;
            }
            for l in (1..=max.min(left)).rev() {
                for c in (1..=left / l).rev() {
                    cur.push((l, c));
                    rec(left - l * c, l - 1, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out.into_iter().map(|parts| CycleType { n, parts }).collect()
    }
}

/// Left-hand side by enumerating cycle types: each type is weighted by its
/// class size, assignments of its cycles to the `k` blocks with
/// `|A_i| <= floor(n u_i)` (`i < k`) are counted by dynamic programming over
/// the block sizes, and divided by `k^c(sigma)` and `n!`.
pub fn lhs_perm_brute(n: u64, k: usize, rect: &RectQuery) -> Result<BigRational> {
    ensure!(n <= MAX_BRUTE_N, Resource, "cycle-type enumeration supports n <= {MAX_BRUTE_N}");
    let caps = caps(n, k, rect)?;
    let dims: Vec<usize> = caps.iter().map(|&c| c as usize + 1).collect();
    let cells: usize = dims.iter().product();
    let kk = BigUint::from(k as u64);
    let mut total = BigRational::zero();
    for ct in CycleType::all(n) {
        // dp[s]: assignments so far giving block sizes s (first k-1 blocks)
        let mut dp = vec![BigUint::zero(); cells];
        dp[0] = BigUint::one();
        for &(l, c) in &ct.parts {
            for _ in 0..c {
                let mut next = dp.clone(); // cycle goes to the last block
                for (idx, ways) in dp.iter().enumerate() {
                    if ways.is_zero() {
                        continue;
                    }
                    let mut rem = idx;
                    let mut stride = cells;
                    for (i, &d) in dims.iter().enumerate() {
                        stride /= d;
                        let s = rem / stride;
                        rem %= stride;
                        if s + l as usize <= caps[i] as usize {
                            next[idx + l as usize * stride] += ways;
                        }
                    }
                }
                dp = next;
            }
        }
        let count: BigUint = dp.iter().sum();
        let num = BigInt::from(ct.class_size() * count);
        let den = BigInt::from(kk.pow(ct.cycles() as u32));
        total += BigRational::new(num, den);
    }
    Ok(total / BigRational::from_integer(BigInt::from(factorial(n))))
}

/// Grid sup of `|lhs_perm_exact - F_alpha|`, `alpha = (1/k, ..., 1/k)`;
/// `scaled_sup_dev = sup_dev * n^{1/k}`. Exact rationals up to
/// [`EXACT_PERM_LIMIT`], `f64` beyond.
pub fn deviation_perm(n: u64, k: usize, step: Rational64, tol: f64) -> Result<DeviationReport> {
    ensure!((2..=6).contains(&k), Domain, "k = {k} outside 2..=6");
    let grid = RectGrid::new(step, k - 1)?;
    let points = grid.points();
    let params = DirichletParams::symmetric(k, 1.0 / k as f64)?;
    let limits = cdf_on_grid(&params, &points, tol)?;
    let empirical: Vec<f64> = points
        .par_iter()
        .map(|p| {
            if n <= EXACT_PERM_LIMIT {
                lhs_perm_exact::<BigRational>(n, k, p).map(|v| Scalar::to_f64(&v))
            } else {
                lhs_perm_exact::<f64>(n, k, p)
            }
        })
        .collect::<Result<_>>()?;
    let rows = points
        .iter()
        .zip(empirical.into_iter().zip(limits))
        .map(|(p, (e, l))| DeviationRow {
            u: p.as_f64(),
            empirical: e,
            limit: l,
            deviation: e - l,
        })
        .collect();
    let rate = (n as f64).powf(1.0 / k as f64);
    Ok(DeviationReport::from_rows("perms", n, k, "uniform", step, rows, rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    fn rect(u: &[(i64, i64)]) -> RectQuery {
        RectQuery::new(u.iter().map(|&(p, q)| r(p, q)).collect()).unwrap()
    }

    /// Brute force over the elements of S_n: every permutation, every
    /// assignment of its cycles to k blocks.
    fn brute_sn(n: usize, k: usize, caps: &[usize]) -> Rational {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = Rational::from_ratio(0, 1);
        let mut count = 0u64;
        loop {
            let mut seen = vec![false; n];
            let mut cycles = Vec::new();
            for s in 0..n {
                if !seen[s] {
                    let mut len = 0;
                    let mut j = s;
                    while !seen[j] {
                        seen[j] = true;
                        j = perm[j];
                        len += 1;
                    }
                    cycles.push(len);
                }
            }
            let c = cycles.len() as u32;
            let assignments = (k as u64).pow(c);
            let mut ok = 0u64;
            for code in 0..assignments {
                let mut sizes = vec![0usize; k];
                let mut x = code;
                for &len in &cycles {
                    sizes[(x % k as u64) as usize] += len;
                    x /= k as u64;
                }
                if sizes[..k - 1].iter().zip(caps).all(|(s, c)| s <= c) {
                    ok += 1;
                }
            }
            total += Rational::from_ratio(ok as i64, assignments as i64);
            count += 1;
            // next permutation in lexicographic order
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        total / Rational::from_u64(count)
    }

    #[test]
    fn stirling_values() {
        let t = StirlingTable::build(200);
        assert_eq!(stirling_first(3, 2, &t).unwrap(), 3u32.into());
        assert_eq!(stirling_first(4, 1, &t).unwrap(), 6u32.into());
        for n in 0..=200 {
            assert_eq!(stirling_first(n, n, &t).unwrap(), BigUint::one());
            if n >= 1 {
                assert!(stirling_first(n, 0, &t).unwrap().is_zero());
            }
            let sum: BigUint = t.row(n).unwrap().iter().sum();
            assert_eq!(sum, factorial(n as u64));
        }
        assert!(stirling_first(201, 3, &t).is_err());
        assert!(stirling_first(3, 4, &t).is_err());
    }

    #[test]
    fn mean_tau_alpha_examples() {
        let t = StirlingTable::build(50);
        assert_eq!(mean_tau_alpha(0, r(5, 7), &t).unwrap(), BigRational::one());
        assert_eq!(mean_tau_alpha(1, r(1, 3), &t).unwrap(), Rational::from_ratio(1, 3));
        assert_eq!(mean_tau_alpha(2, r(1, 2), &t).unwrap(), Rational::from_ratio(3, 8));
        for n in 0..=50 {
            for a in [r(1, 2), r(1, 3), r(1, 5), r(2, 1), r(7, 3)] {
                assert!(mean_tau_alpha(n, a, &t).is_ok());
            }
        }
    }

    #[test]
    fn hand_oracles() {
        let v: Rational = lhs_perm_exact(2, 2, &rect(&[(1, 2)])).unwrap();
        assert_eq!(v, Rational::from_ratio(5, 8));
        assert_eq!(lhs_perm_brute(2, 2, &rect(&[(1, 2)])).unwrap(), Rational::from_ratio(5, 8));
        assert_eq!(lhs_perm_brute(1, 2, &rect(&[(0, 1)])).unwrap(), Rational::from_ratio(1, 2));
        let v: Rational = lhs_perm_exact(0, 3, &rect(&[(1, 3), (1, 3)])).unwrap();
        assert_eq!(v, Rational::from_ratio(1, 1));
    }

    #[test]
    fn cycle_types_partition_sn() {
        for n in 0..=12u64 {
            let total: BigUint = CycleType::all(n).iter().map(|c| c.class_size()).sum();
            assert_eq!(total, factorial(n));
        }
        assert_eq!(CycleType::all(10).len(), 42);
    }

    #[test]
    fn brute_matches_element_enumeration() {
        for n in 1..=6usize {
            for k in 2..=3usize {
                let grid = RectGrid::new(r(1, 5), k - 1).unwrap();
                for p in grid.points() {
                    let caps: Vec<usize> = p.floor_scaled(n as u64).iter().map(|&c| c as usize).collect();
                    assert_eq!(
                        lhs_perm_brute(n as u64, k, &p).unwrap(),
                        brute_sn(n, k, &caps),
                        "n = {n}, k = {k}, u = {:?}",
                        p.as_f64()
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_equals_brute_force() {
        for n in 0..=8u64 {
            for k in 2..=3usize {
                let grid = RectGrid::new(r(1, 10), k - 1).unwrap();
                for p in grid.points() {
                    let exact: Rational = lhs_perm_exact(n, k, &p).unwrap();
                    assert_eq!(exact, lhs_perm_brute(n, k, &p).unwrap());
                }
            }
        }
    }

    #[test]
    fn full_rect_is_one() {
        let t = StirlingTable::build(100);
        for n in 0..=100u64 {
            let v: Rational = lhs_perm_exact(n, 2, &rect(&[(1, 1)])).unwrap();
            assert_eq!(v, BigRational::one(), "n = {n}");
            // block 2 empty: Vandermonde gives C(n + 2/3 - 1, n)
            let v: Rational = lhs_perm_exact(n, 3, &rect(&[(1, 1), (0, 1)])).unwrap();
            assert_eq!(v, mean_tau_alpha(n as usize, r(2, 3), &t).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn float_path_tracks_exact_path() {
        for n in [50u64, 300] {
            for p in RectGrid::new(r(1, 20), 2).unwrap().points() {
                let exact: Rational = lhs_perm_exact(n, 3, &p).unwrap();
                let float: f64 = lhs_perm_exact(n, 3, &p).unwrap();
                let e = exact.to_f64();
                assert!(((float - e) / e).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn deviation_examples() {
        let d = deviation_perm(2, 2, r(1, 2), 1e-10).unwrap();
        assert_eq!(d.rows.len(), 1);
        assert!((d.sup_dev - 0.125).abs() < 1e-12);
        let small = deviation_perm(10, 2, r(1, 20), 1e-10).unwrap();
        let large = deviation_perm(1000, 2, r(1, 20), 1e-10).unwrap();
        assert!(large.sup_dev < small.sup_dev);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            lhs_perm_exact::<f64>(6000, 2, &rect(&[(1, 2)])),
            Err(Error::Resource(_))
        ));
        assert!(lhs_perm_brute(41, 2, &rect(&[(1, 2)])).is_err());
        assert!(lhs_perm_exact::<f64>(5, 7, &rect(&[(1, 7); 6])).is_err());
    }
}
