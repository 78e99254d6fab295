use num_integer::Integer;
use rayon::prelude::*;

use super::enumerate::{for_each_tuple, LocalTable};
use super::power::bin_index;
use crate::arith::{SpfSieve, WeightModel};
use crate::error::{ensure, Error, Result};
use crate::grid::RectQuery;

/// Cap on `bins^(k-1)`.
pub const MAX_HISTOGRAM_CELLS: u64 = 100_000_000;

/// Weights are stored in fixed point with this many fractional bits, so
/// merging shards is integer addition and independent of the shard layout.
const FRACTION_BITS: i32 = 64;

fn to_fixed(w: f64) -> u128 {
    (w * 2f64.powi(FRACTION_BITS)).round() as u128
}

/// Binned empirical law of `(log d_1 / log n, ..., log d_{k-1} / log n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistogramGrid {
    k: usize,
    bins: usize,
    cells: Vec<u128>,
    cumulative: Vec<u128>,
    total: u128,
    normalizer: u128,
}

impl HistogramGrid {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bins_per_dim(&self) -> usize {
        self.bins
    }

    /// Normalized bin weights, row-major with the first coordinate slowest.
    pub fn weights(&self) -> Vec<f64> {
        let t = self.total as f64;
        self.cells.iter().map(|&c| c as f64 / t).collect()
    }

    /// Deposited weight divided by `sum f(n)`; 1 up to fixed-point rounding.
    pub fn mass_ratio(&self) -> f64 {
        self.total as f64 / self.normalizer as f64
    }

    /// `sum_{n <= x} f(n)`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer as f64 / 2f64.powi(FRACTION_BITS)
    }

    /// Raw fixed-point cells as little-endian bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.cells.len() * 16 + 32);
        out.extend_from_slice(&self.total.to_le_bytes());
        out.extend_from_slice(&self.normalizer.to_le_bytes());
        for c in &self.cells {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }
}

/// Bins every factorization of every `n <= x` with `f(n) > 0`, weighting it
/// by `f(n) G / sum G`; `n = 1` lands in the origin bin. The range `1..=x` is
/// split into `shards` contiguous pieces processed in parallel.
pub fn accumulate_histogram(
    x: u64,
    model: &WeightModel,
    bins: usize,
    shards: usize,
    sieve: &SpfSieve,
) -> Result<HistogramGrid> {
    ensure!(x >= 1, Domain, "x must be at least 1");
    ensure!((10..=2000).contains(&bins), Domain, "bins = {bins} outside 10..=2000");
    ensure!(shards >= 1, Domain, "shards must be at least 1");
    ensure!(x <= sieve.limit(), Domain, "x = {x} exceeds the sieve limit {}", sieve.limit());
    let k = model.k();
    let dim = k - 1;
    let cells = (bins as u64)
        .checked_pow(dim as u32)
        .filter(|&c| c <= MAX_HISTOGRAM_CELLS)
        .ok_or_else(|| {
            Error::Resource(format!("{bins}^{dim} histogram cells exceed {MAX_HISTOGRAM_CELLS}"))
        })? as usize;

    let shards = shards.min(x as usize);
    let ranges: Vec<(u64, u64)> = (0..shards as u64)
        .map(|s| (s * x / shards as u64 + 1, (s + 1) * x / shards as u64))
        .collect();
    let partials: Vec<Result<(Vec<u128>, u128)>> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut table = LocalTable::<f64>::new(model);
            let mut acc = vec![0u128; cells];
            let mut f_fixed = 0u128;
            for n in lo..=hi {
                let fac = sieve.factorize_unchecked(n);
                let locals: Vec<_> = fac.factors().iter().map(|&(p, v)| table.get(p, v)).collect();
                let f: f64 = locals.iter().map(|l| l.f).product();
                if f == 0.0 {
                    continue;
                }
                let total: f64 = locals.iter().map(|l| l.sum).product();
                if total == 0.0 {
                    return Err(Error::Integrity(format!(
                        "model {model}: f({n}) > 0 but the factorization weights sum to 0"
                    )));
                }
                f_fixed += to_fixed(f);
                let coef = f / total;
                for_each_tuple(fac.factors(), &locals, k, &mut |d, w| {
                    let cell = d[..dim]
                        .iter()
                        .fold(0usize, |c, &di| c * bins + bin_index(di, n, bins as u64) as usize);
                    acc[cell] += to_fixed(coef * w);
                });
            }
            Ok((acc, f_fixed))
        })
        .collect();

    let mut merged = vec![0u128; cells];
    let mut normalizer = 0u128;
    for part in partials {
        let (acc, f) = part?;
        for (m, a) in merged.iter_mut().zip(acc) {
            *m += a;
        }
        normalizer += f;
    }
    let total: u128 = merged.iter().sum();

    let mut cumulative = merged.clone();
    let mut stride = 1usize;
    for _ in 0..dim {
        for i in 0..cells {
            if !(i / stride).is_multiple_of(bins) {
                cumulative[i] += cumulative[i - stride];
            }
        }
        stride *= bins;
    }
    Ok(HistogramGrid {
        k,
        bins,
        cells: merged,
        cumulative,
        total,
        normalizer,
    })
}

/// Mass of the bins whose lower corner lies in `[0, u]`; coordinates above 1
/// are clamped.
pub fn empirical_cdf(grid: &HistogramGrid, rect: &RectQuery) -> Result<f64> {
    ensure!(
        rect.dim() + 1 == grid.k,
        Domain,
        "query has {} coordinates, histogram has k = {}",
        rect.dim(),
        grid.k
    );
    let bins = grid.bins as i128;
    let cell = rect.coords().iter().fold(0usize, |c, u| {
        let j = Integer::div_floor(&(*u.numer() as i128 * bins), &(*u.denom() as i128));
        c * grid.bins + j.clamp(0, bins - 1) as usize
    });
    Ok(grid.cumulative[cell] as f64 / grid.total as f64)
}
