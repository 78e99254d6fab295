use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::divisor::compositions;
use super::{FactoredInteger, WeightModel};
use crate::error::{ensure, Result};

/// Draws `(d_1, ..., d_k)` with `d_1 ... d_k = n` with probability
/// `G(d) / sum G`, choosing a composition independently for each prime.
pub fn sample_factorization_with<R: Rng + ?Sized>(
    n: &FactoredInteger,
    model: &WeightModel,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let k = model.k();
    let mut parts = vec![1u64; k];
    for &(p, v) in n.factors() {
        let comps = compositions(v, k);
        let weights: Vec<f64> = comps.chunks(k).map(|c| model.g_local::<f64>(p, c)).collect();
        let total: f64 = weights.iter().sum();
        ensure!(
            total > 0.0,
            Domain,
            "model {model} gives zero local weight at {p}^{v}; cannot sample n = {}",
            n.n()
        );
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if target < acc {
                pick = i;
                break;
            }
        }
        while weights[pick] == 0.0 {
            pick -= 1;
        }
        for (part, &e) in parts.iter_mut().zip(&comps[pick * k..(pick + 1) * k]) {
            *part *= p.pow(e);
        }
    }
    Ok(parts)
}

/// Seeded convenience wrapper around [`sample_factorization_with`].
pub fn sample_factorization(n: &FactoredInteger, model: &WeightModel, seed: u64) -> Result<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_factorization_with(n, model, &mut rng)
}
