use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::irreducible::IrreducibleTable;
use crate::arith::{binomial_u128, compositions};
use crate::dirichlet::{cdf_on_grid, DirichletParams};
use crate::error::{ensure, Error, Result};
use crate::grid::{DeviationReport, DeviationRow, RectGrid, RectQuery};

/// Cap on `q^n` for the enumeration of `M_q(n)`.
pub const MAX_POLY_ENUMERATION: u64 = 10_000_000;

const CHUNK: u64 = 1 << 14;

/// Divisor-tuple degree counts over all monic polynomials of degree `n`.
///
/// `counts[tau]` is a dense array over degree vectors `(deg D_1, ...,
/// deg D_{k-1})` in `0..=n`, first coordinate slowest, holding the number of
/// pairs `(F, (D_1, ..., D_k))` with `tau_k(F) = tau` and those degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyDegreeCounts {
    q: u32,
    n: u32,
    k: usize,
    counts: BTreeMap<u64, Vec<u64>>,
}

fn check(q: u32, n: u32, k: usize, table: &IrreducibleTable) -> Result<()> {
    ensure!(table.q() == q, Domain, "table is over F_{}, not F_{q}", table.q());
    ensure!((2..=6).contains(&k), Domain, "k = {k} outside 2..=6");
    ensure!(
        (q as u64).checked_pow(n).is_some_and(|s| s <= MAX_POLY_ENUMERATION),
        Resource,
        "q^n = {q}^{n} exceeds {MAX_POLY_ENUMERATION}"
    );
    ensure!(
        table.max_deg() >= n / 2,
        Domain,
        "irreducible table reaches degree {}, need {}",
        table.max_deg(),
        n / 2
    );
    Ok(())
}

impl PolyDegreeCounts {
    /// Enumerates `M_q(n)` by code, factors each polynomial and files every
    /// ordered divisor tuple by its degree vector.
    pub fn build(q: u32, n: u32, k: usize, table: &IrreducibleTable) -> Result<Self> {
        check(q, n, k, table)?;
        let dim = k - 1;
        let side = n as usize + 1;
        let cells = side.pow(dim as u32);
        let start = (q as u64).pow(n);
        let chunks: Vec<(u64, u64)> = (0..start.div_ceil(CHUNK))
            .map(|c| (start + c * CHUNK, start + ((c + 1) * CHUNK).min(start)))
            .collect();
        let comp_cache: Vec<Vec<u32>> = (0..=n).map(|v| compositions(v, k)).collect();
        let partials: Vec<BTreeMap<u64, Vec<u64>>> = chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut map: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
                let mut shape = Vec::new();
                let mut coeffs = Vec::with_capacity(n as usize + 1);
                for code in lo..hi {
                    coeffs.clear();
                    let mut c = code;
                    while c > 0 {
                        coeffs.push((c % q as u64) as u32);
                        c /= q as u64;
                    }
                    table.factor_shape(&coeffs, &mut shape);
                    let tau: u64 = shape
                        .iter()
                        .map(|&(_, e)| binomial_u128(e as u64 + k as u64 - 1, k as u64 - 1) as u64)
                        .product();
                    let slot = map.entry(tau).or_insert_with(|| vec![0; cells]);
                    // walk the product of per-factor compositions
                    let mut degs = vec![0u32; dim];
                    walk(&shape, 0, &comp_cache, k, &mut degs, side, slot);
                }
                map
            })
            .collect();
        let mut counts: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for part in partials {
            for (tau, v) in part {
                let slot = counts.entry(tau).or_insert_with(|| vec![0; cells]);
                for (s, x) in slot.iter_mut().zip(v) {
                    *s += x;
                }
            }
        }
        Ok(Self { q, n, k, counts })
    }

    /// Sum over `tau` of `(1/tau)` times the count of tuples with
    /// `deg D_i <= floor(n u_i)`, divided by `q^n`.
    pub fn lhs(&self, rect: &RectQuery) -> Result<BigRational> {
        let dim = self.k - 1;
        ensure!(rect.dim() == dim, Domain, "rect has {} coordinates, expected {dim}", rect.dim());
        let side = self.n as usize + 1;
        let caps: Vec<usize> = rect
            .floor_scaled(self.n as u64)
            .into_iter()
            .map(|c| (c as usize).min(self.n as usize))
            .collect();
        let mut acc = BigRational::zero();
        for (&tau, cells) in &self.counts {
            let mut hits: u128 = 0;
            for (i, &c) in cells.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let mut rem = i;
                let mut ok = true;
                for d in (0..dim).rev() {
                    if rem % side > caps[d] {
                        ok = false;
                        break;
                    }
                    rem /= side;
                }
                if ok {
                    hits += c as u128;
                }
            }
            acc += BigRational::new(BigInt::from(hits), BigInt::from(tau));
        }
        let total = BigUint::from(self.q).pow(self.n);
        Ok(acc / BigRational::from_integer(BigInt::from(total)))
    }
}

fn walk(
    shape: &[(u32, u32)],
    level: usize,
    comps: &[Vec<u32>],
    k: usize,
    degs: &mut [u32],
    side: usize,
    slot: &mut [u64],
) {
    if level == shape.len() {
        let cell = degs.iter().fold(0usize, |c, &d| c * side + d as usize);
        slot[cell] += 1;
        return;
    }
    let (deg, e) = shape[level];
    for c in comps[e as usize].chunks(k) {
        for (d, &ci) in degs.iter_mut().zip(c) {
            *d += ci * deg;
        }
        walk(shape, level + 1, comps, k, degs, side, slot);
        for (d, &ci) in degs.iter_mut().zip(c) {
            *d -= ci * deg;
        }
    }
}

/// `q^{-n} sum_{F in M_q(n)} tau_k(F)^{-1} #{(D_1, ..., D_k) : F = D_1 ... D_k,
/// deg D_i <= n u_i (i < k)}`, exactly.
pub fn exact_lhs_poly(
    q: u32,
    n: u32,
    k: usize,
    rect: &RectQuery,
    table: &IrreducibleTable,
) -> Result<BigRational> {
    ensure!(rect.dim() + 1 == k, Domain, "rect has {} coordinates, expected {}", rect.dim(), k - 1);
    PolyDegreeCounts::build(q, n, k, table)?.lhs(rect)
}

/// Grid sup of `|exact_lhs_poly - F_alpha|` with `alpha = (1/k, ..., 1/k)`;
/// `scaled_sup_dev = sup_dev * n^{1/k}`.
pub fn deviation_poly(
    q: u32,
    n: u32,
    k: usize,
    step: Rational64,
    table: &IrreducibleTable,
    tol: f64,
) -> Result<DeviationReport> {
    let counts = PolyDegreeCounts::build(q, n, k, table)?;
    let grid = RectGrid::new(step, k - 1)?;
    let points = grid.points();
    let params = DirichletParams::symmetric(k, 1.0 / k as f64)?;
    let limits = cdf_on_grid(&params, &points, tol)?;
    let rows = points
        .iter()
        .zip(limits)
        .map(|(p, limit)| {
            let e = counts.lhs(p)?.to_f64().ok_or_else(|| Error::Integrity("lhs overflow".into()))?;
            Ok(DeviationRow {
                u: p.as_f64(),
                empirical: e,
                limit,
                deviation: e - limit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rate = (n as f64).powf(1.0 / k as f64);
    Ok(DeviationReport::from_rows(
        "polys",
        n as u64,
        k,
        &format!("uniform:q={q}"),
        step,
        rows,
        rate,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::poly::{poly_divrem, PolyQ};
    use crate::Rational;
    use crate::Scalar;

    fn rect(u: &[(i64, i64)]) -> RectQuery {
        RectQuery::new(u.iter().map(|&(p, q)| Rational64::new(p, q)).collect()).unwrap()
    }

    /// Direct oracle for k = 2: every monic divisor of every monic F.
    fn brute_k2(q: u32, n: u32, cap: u32) -> Rational {
        let monic = |d: u32| {
            let lo = (q as u64).pow(d);
            (lo..2 * lo).map(move |c| PolyQ::from_code(q, c).unwrap())
        };
        let mut acc = Rational::from_ratio(0, 1);
        for f in monic(n) {
            let divs: Vec<u32> = (0..=n)
                .flat_map(monic)
                .filter(|g| poly_divrem(&f, g).unwrap().1.is_zero())
                .map(|g| g.degree().unwrap() as u32)
                .collect();
            let hits = divs.iter().filter(|&&d| d <= cap).count();
            acc += Rational::from_ratio(hits as i64, divs.len() as i64);
        }
        acc / Rational::from_u64((q as u64).pow(n))
    }

    #[test]
    fn hand_oracles() {
        let t = IrreducibleTable::build(2, 4).unwrap();
        let v = exact_lhs_poly(2, 2, 2, &rect(&[(1, 2)]), &t).unwrap();
        assert_eq!(v, Rational::from_ratio(31, 48));
        assert_eq!(brute_k2(2, 2, 1), Rational::from_ratio(31, 48));
        let v = exact_lhs_poly(2, 1, 2, &rect(&[(0, 1)]), &t).unwrap();
        assert_eq!(v, Rational::from_ratio(1, 2));
    }

    #[test]
    fn matches_divisor_oracle() {
        for q in [2u32, 3] {
            let t = IrreducibleTable::build(q, 4).unwrap();
            for n in 1..=6u32 {
                if (q as u64).pow(n) > 800 {
                    continue;
                }
                let counts = PolyDegreeCounts::build(q, n, 2, &t).unwrap();
                for cap in 0..=n {
                    let r = rect(&[(cap as i64, n as i64)]);
                    assert_eq!(counts.lhs(&r).unwrap(), brute_k2(q, n, cap), "q = {q} n = {n}");
                }
            }
        }
    }

    #[test]
    fn full_rect_and_monotonicity() {
        let t = IrreducibleTable::build(3, 4).unwrap();
        for n in 1..=8u32 {
            let c = PolyDegreeCounts::build(3, n, 2, &t).unwrap();
            assert_eq!(c.lhs(&rect(&[(1, 1)])).unwrap(), Rational::from_ratio(1, 1));
        }
        let c = PolyDegreeCounts::build(2, 10, 3, &IrreducibleTable::build(2, 5).unwrap()).unwrap();
        let grid = RectGrid::new(Rational64::new(1, 10), 2).unwrap();
        let pts = grid.points();
        let vals: Vec<Rational> = pts.iter().map(|p| c.lhs(p).unwrap()).collect();
        for (i, a) in pts.iter().enumerate() {
            for (j, b) in pts.iter().enumerate() {
                if a.coords().iter().zip(b.coords()).all(|(x, y)| x <= y) {
                    assert!(vals[i] <= vals[j]);
                }
            }
        }
    }

    #[test]
    fn enumeration_is_complete() {
        for q in [2u32, 3] {
            let t = IrreducibleTable::build(q, 6).unwrap();
            for n in 0..=12u32 {
                if (q as u64).pow(n) > 600_000 {
                    continue;
                }
                let c = PolyDegreeCounts::build(q, n, 2, &t).unwrap();
                // tuples with tau = t contribute t each, so sum count / tau = q^n
                let polys: u128 = c
                    .counts
                    .iter()
                    .map(|(&tau, v)| v.iter().map(|&x| x as u128).sum::<u128>() / tau as u128)
                    .sum();
                assert_eq!(polys, (q as u128).pow(n));
            }
        }
    }

    #[test]
    fn deviation_small_cases() {
        let t = IrreducibleTable::build(2, 8).unwrap();
        let r = deviation_poly(2, 1, 2, Rational64::new(1, 10), &t, 1e-10).unwrap();
        for row in &r.rows {
            assert!([0.0, 0.5, 1.0].contains(&row.empirical));
        }
        let small = deviation_poly(2, 4, 2, Rational64::new(1, 20), &t, 1e-10).unwrap();
        let large = deviation_poly(2, 16, 2, Rational64::new(1, 20), &t, 1e-10).unwrap();
        assert!(large.sup_dev < small.sup_dev);
    }

    #[test]
    fn guard() {
        let t = IrreducibleTable::build(2, 12).unwrap();
        assert!(matches!(
            exact_lhs_poly(2, 24, 2, &rect(&[(1, 2)]), &t),
            Err(Error::Resource(_))
        ));
    }
}
