use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::power::leq_power;
use crate::arith::{sample_factorization_with, SpfSieve, WeightModel};
use crate::dirichlet::MonteCarloEstimate;
use crate::error::{ensure, Result};
use crate::grid::RectQuery;

const BLOCK: u64 = 65_536;

/// Monte Carlo estimate of [`exact_lhs`](super::exact_lhs): `n` uniform in
/// `1..=x`, kept with probability `f(n)`, then a factorization drawn with
/// probability `G / sum G`. Blocks of draws use separate ChaCha streams.
pub fn mc_lhs(
    x: u64,
    model: &WeightModel,
    rect: &RectQuery,
    n_samples: u64,
    seed: u64,
    sieve: &SpfSieve,
) -> Result<MonteCarloEstimate> {
    ensure!(
        model.f_is_indicator(),
        Unsupported,
        "Monte Carlo needs f bounded by 1; model {model} is exact-path only"
    );
    ensure!(n_samples >= 1000, Domain, "need at least 1000 samples, got {n_samples}");
    ensure!(x >= 1 && x <= sieve.limit(), Domain, "x = {x} outside 1..={}", sieve.limit());
    ensure!(
        rect.dim() + 1 == model.k(),
        Domain,
        "query has {} coordinates but model {model} has k = {}",
        rect.dim(),
        model.k()
    );
    let u: Vec<(u64, u64)> = rect
        .coords()
        .iter()
        .map(|r| (*r.numer() as u64, *r.denom() as u64))
        .collect();
    let blocks = n_samples.div_ceil(BLOCK);
    let hits = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<u64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = BLOCK.min(n_samples - b * BLOCK);
            let mut hits = 0u64;
            let mut done = 0u64;
            while done < len {
                let n = rng.random_range(1..=x);
                let fac = sieve.factorize_unchecked(n);
                if model.f_value::<f64>(&fac) == 0.0 {
                    continue;
                }
                done += 1;
                let d = sample_factorization_with(&fac, model, &mut rng)?;
                if d.iter().zip(&u).all(|(&di, &(a, b))| leq_power(di, n, a, b)) {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    Ok(MonteCarloEstimate::from_counts(hits, n_samples))
}
