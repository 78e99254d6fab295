use num_rational::Rational64;
use rayon::prelude::*;

use super::enumerate::{for_each_tuple, LocalTable};
use super::power::{leq_power, min_grid_index};
use crate::arith::{SpfSieve, WeightModel};
use crate::error::{ensure, Error, Result};
use crate::grid::{RectGrid, RectQuery};
use crate::scalar::Scalar;

/// Largest `x` accepted by the exact-rational path.
pub const EXACT_RATIONAL_LIMIT: u64 = 10_000_000;

/// Largest number of grid cells accumulated by [`exact_lhs_grid`].
const MAX_GRID_CELLS: usize = 10_000_000;

const CHUNK: u64 = 4096;

fn check_inputs<S: Scalar>(x: u64, model: &WeightModel, dim: usize, sieve: &SpfSieve) -> Result<()> {
    ensure!(x >= 1, Domain, "x must be at least 1");
    ensure!(
        dim + 1 == model.k(),
        Domain,
        "query has {dim} coordinates but model {model} has k = {}",
        model.k()
    );
    ensure!(
        x <= sieve.limit(),
        Domain,
        "x = {x} exceeds the sieve limit {}",
        sieve.limit()
    );
    ensure!(
        !S::EXACT || x <= EXACT_RATIONAL_LIMIT,
        Resource,
        "exact mode supports x <= {EXACT_RATIONAL_LIMIT}, got {x}"
    );
    Ok(())
}

fn ratio(r: &Rational64) -> (u64, u64) {
    (*r.numer() as u64, *r.denom() as u64)
}

/// Runs `per_n(n, coef, tuples)` over `1..=x` in fixed chunks and merges the
/// chunk results in order. `coef = f(n) / sum G` is passed with the tuple
/// visitor; integers with `f(n) = 0` are skipped.
fn chunked<S, T, Init, Step, Merge>(
    x: u64,
    model: &WeightModel,
    sieve: &SpfSieve,
    init: Init,
    step: Step,
    merge: Merge,
) -> Result<(T, S)>
where
    S: Scalar,
    T: Send,
    Init: Fn() -> T + Sync,
    Step: Fn(&mut T, u64, &[(u64, u32)], &[std::sync::Arc<super::LocalData<S>>], &S) + Sync,
    Merge: Fn(&mut T, T),
{
    let chunks: Vec<(u64, u64)> = (0..x.div_ceil(CHUNK))
        .map(|c| (c * CHUNK + 1, ((c + 1) * CHUNK).min(x)))
        .collect();
    let parts: Vec<Result<(T, S)>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut table = LocalTable::<S>::new(model);
            let mut acc = init();
            let mut f_sum = S::zero();
            for n in lo..=hi {
                let fac = sieve.factorize_unchecked(n);
                let locals: Vec<_> = fac.factors().iter().map(|&(p, v)| table.get(p, v)).collect();
                let f = locals.iter().fold(S::one(), |a, l| a * l.f.clone());
                if f.is_zero() {
                    continue;
                }
                let total = locals.iter().fold(S::one(), |a, l| a * l.sum.clone());
                if total.is_zero() {
                    return Err(Error::Integrity(format!(
                        "model {model}: f({n}) > 0 but the factorization weights sum to 0"
                    )));
                }
                let coef = f.clone() / total;
                step(&mut acc, n, fac.factors(), &locals, &coef);
                f_sum = f_sum + f;
            }
            Ok((acc, f_sum))
        })
        .collect();
    let mut out = init();
    let mut f_sum = S::zero();
    for part in parts {
        let (acc, f) = part?;
        merge(&mut out, acc);
        f_sum = f_sum + f;
    }
    Ok((out, f_sum))
}

/// `(sum_{m<=x} f(m))^{-1} sum_{n<=x} f(n) (sum G)^{-1} sum G(d)` over
/// factorizations `n = d_1 ... d_k` with `d_i <= n^{u_i}` for `i < k`.
///
/// `n = 1` contributes its full weight for every `u`.
pub fn exact_lhs<S: Scalar>(
    x: u64,
    model: &WeightModel,
    rect: &RectQuery,
    sieve: &SpfSieve,
) -> Result<S> {
    check_inputs::<S>(x, model, rect.dim(), sieve)?;
    let k = model.k();
    let u: Vec<(u64, u64)> = rect.coords().iter().map(ratio).collect();
    let (num, f_sum) = chunked::<S, S, _, _, _>(
        x,
        model,
        sieve,
        S::zero,
        |acc, n, factors, locals, coef| {
            let mut hit = S::zero();
            for_each_tuple(factors, locals, k, &mut |d, w| {
                if d.iter().zip(&u).all(|(&di, &(a, b))| leq_power(di, n, a, b)) {
                    hit = hit.clone() + w.clone();
                }
            });
            *acc = acc.clone() + coef.clone() * hit;
        },
        |out, part| *out = out.clone() + part,
    )?;
    Ok(num / f_sum)
}

/// Left-hand side on every point of a grid.
#[derive(Debug, Clone)]
pub struct GridLhs<S> {
    pub points: Vec<RectQuery>,
    pub values: Vec<S>,
}

/// [`exact_lhs`] on all points of `grid` in one pass: every factorization is
/// filed under its smallest admissible grid index per coordinate, and the
/// grid values are prefix sums of those cells.
pub fn exact_lhs_grid<S: Scalar>(
    x: u64,
    model: &WeightModel,
    grid: &RectGrid,
    sieve: &SpfSieve,
) -> Result<GridLhs<S>> {
    let dim = grid.dim();
    check_inputs::<S>(x, model, dim, sieve)?;
    let k = model.k();
    let (a, b) = ratio(&grid.step());
    let max = grid.max_index() as u64;
    let side = max as usize + 2;
    let cells = side
        .checked_pow(dim as u32)
        .filter(|&c| c <= MAX_GRID_CELLS)
        .ok_or_else(|| Error::Resource(format!("grid with {side}^{dim} cells is too large")))?;

    let (acc, f_sum) = chunked::<S, Vec<S>, _, _, _>(
        x,
        model,
        sieve,
        || vec![S::zero(); cells],
        |acc, n, factors, locals, coef| {
            for_each_tuple(factors, locals, k, &mut |d, w| {
                let mut cell = 0usize;
                for &di in &d[..dim] {
                    let g = min_grid_index(di, n, a, b).unwrap_or(max + 1).min(max + 1);
                    cell = cell * side + g as usize;
                }
                acc[cell] = acc[cell].clone() + coef.clone() * w.clone();
            });
        },
        |out, part| {
            for (o, p) in out.iter_mut().zip(part) {
                *o = o.clone() + p;
            }
        },
    )?;

    let mut cum = acc;
    let mut stride = 1usize;
    for _ in 0..dim {
        for i in 0..cells {
            if !(i / stride).is_multiple_of(side) {
                let prev = cum[i - stride].clone();
                cum[i] = cum[i].clone() + prev;
            }
        }
        stride *= side;
    }

    let index_points = grid.index_points();
    let values = index_points
        .iter()
        .map(|g| {
            let cell = g.iter().fold(0usize, |c, &gi| c * side + gi as usize);
            cum[cell].clone() / f_sum.clone()
        })
        .collect();
    Ok(GridLhs {
        points: grid.points(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn rect(u: &[(i64, i64)]) -> RectQuery {
        RectQuery::new(u.iter().map(|&(p, q)| Rational64::new(p, q)).collect()).unwrap()
    }

    /// Plain divisor loop for k = 2: average of #{d | n : d^b <= n^a} / tau(n).
    fn brute_k2(x: u64, a: u64, b: u64) -> Rational {
        let mut acc = Rational::from_ratio(0, 1);
        for n in 1..=x {
            let divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            let hits = divs
                .iter()
                .filter(|&&d| {
                    num_bigint::BigUint::from(d).pow(b as u32)
                        <= num_bigint::BigUint::from(n).pow(a as u32)
                })
                .count();
            acc += Rational::from_ratio(hits as i64, divs.len() as i64);
        }
        acc / Rational::from_u64(x)
    }

    #[test]
    fn hand_oracles() {
        let s = SpfSieve::build(100).unwrap();
        let m = WeightModel::uniform(2).unwrap();
        let v: Rational = exact_lhs(4, &m, &rect(&[(1, 2)]), &s).unwrap();
        assert_eq!(v, Rational::from_ratio(2, 3));
        let v: Rational = exact_lhs(4, &m, &rect(&[(1, 4)]), &s).unwrap();
        assert_eq!(v, Rational::from_ratio(7, 12));
        assert_eq!(brute_k2(4, 1, 2), Rational::from_ratio(2, 3));
        for x in [1u64, 7, 50, 100] {
            let v: Rational = exact_lhs(x, &m, &rect(&[(1, 1)]), &s).unwrap();
            assert_eq!(v, Rational::from_ratio(1, 1));
        }
    }

    #[test]
    fn matches_divisor_loop() {
        let s = SpfSieve::build(2000).unwrap();
        let m = WeightModel::uniform(2).unwrap();
        for (a, b) in [(1, 2), (1, 3), (2, 5), (3, 10), (0, 1), (7, 10)] {
            let v: Rational = exact_lhs(2000, &m, &rect(&[(a, b)]), &s).unwrap();
            assert_eq!(v, brute_k2(2000, a as u64, b as u64), "u = {a}/{b}");
        }
    }

    #[test]
    fn full_rect_is_one_up_to_ten_thousand() {
        let s = SpfSieve::build(10_000).unwrap();
        let m = WeightModel::uniform(2).unwrap();
        for x in [1u64, 2, 3, 10, 999, 10_000] {
            let v: Rational = exact_lhs(x, &m, &rect(&[(1, 1)]), &s).unwrap();
            assert_eq!(v, Rational::from_ratio(1, 1), "x = {x}");
        }
    }

    #[test]
    fn grid_path_equals_pointwise_path() {
        let s = SpfSieve::build(3000).unwrap();
        for (model, step) in [
            (WeightModel::uniform(2).unwrap(), Rational64::new(1, 20)),
            (WeightModel::uniform(3).unwrap(), Rational64::new(1, 10)),
            (WeightModel::nested(3).unwrap(), Rational64::new(1, 4)),
            (WeightModel::residues(5).unwrap(), Rational64::new(1, 4)),
            (WeightModel::parse("tau-weights:1;1,2,3", None).unwrap(), Rational64::new(1, 5)),
            (WeightModel::two_squares(2).unwrap(), Rational64::new(3, 10)),
        ] {
            let grid = RectGrid::new(step, model.k() - 1).unwrap();
            let out = exact_lhs_grid::<Rational>(3000, &model, &grid, &s).unwrap();
            for (p, v) in out.points.iter().zip(&out.values) {
                let direct: Rational = exact_lhs(3000, &model, p, &s).unwrap();
                assert_eq!(v, &direct, "{model} at {:?}", p.as_f64());
            }
        }
    }

    #[test]
    fn monotone_in_each_coordinate() {
        let s = SpfSieve::build(2000).unwrap();
        let m = WeightModel::uniform(3).unwrap();
        let grid = RectGrid::new(Rational64::new(1, 10), 2).unwrap();
        let out = exact_lhs_grid::<Rational>(2000, &m, &grid, &s).unwrap();
        let idx = grid.index_points();
        for (i, gi) in idx.iter().enumerate() {
            for (j, gj) in idx.iter().enumerate() {
                if gi.iter().zip(gj).all(|(a, b)| a <= b) {
                    assert!(out.values[i] <= out.values[j]);
                }
            }
        }
    }

    #[test]
    fn f32_and_f64_agree_with_exact() {
        let s = SpfSieve::build(5000).unwrap();
        let m = WeightModel::squarefree(2).unwrap();
        let q = rect(&[(1, 3)]);
        let exact: Rational = exact_lhs(5000, &m, &q, &s).unwrap();
        let e = exact.to_f64();
        let d: f64 = exact_lhs(5000, &m, &q, &s).unwrap();
        let f: f32 = exact_lhs(5000, &m, &q, &s).unwrap();
        assert!((d - e).abs() < 1e-12);
        assert!((f as f64 - e).abs() < 1e-4);
    }

    #[test]
    fn input_checks() {
        let s = SpfSieve::build(10).unwrap();
        let m = WeightModel::uniform(3).unwrap();
        assert!(exact_lhs::<f64>(5, &m, &rect(&[(1, 2)]), &s).is_err());
        let m = WeightModel::uniform(2).unwrap();
        assert!(exact_lhs::<f64>(11, &m, &rect(&[(1, 2)]), &s).is_err());
        assert!(exact_lhs::<f64>(0, &m, &rect(&[(1, 2)]), &s).is_err());
    }
}
