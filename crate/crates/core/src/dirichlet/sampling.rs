use rand::distr::{Distribution, StandardUniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{DirichletParams, SimplexPoint};
use crate::error::{ensure, Result};
use crate::scalar::Real;

const MC_BLOCK: u64 = 1 << 16;

/// Natural log of a `Gamma(shape, 1)` variate.
///
/// Marsaglia-Tsang for `shape >= 1`; for `shape < 1` a `Gamma(shape + 1)`
/// draw boosted by `U^(1/shape)`, kept in log space so tiny shapes never
/// underflow to zero.
pub fn sample_ln_gamma<T, R>(shape: T, rng: &mut R) -> T
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    if shape < T::one() {
        let boost: T = loop {
            let u: T = rng.random();
            if u > T::zero() {
                break u.ln() / shape;
            }
        };
        return sample_ln_gamma(shape + T::one(), rng) + boost;
    }
    let d = shape - T::lit(1.0 / 3.0);
    let c = T::one() / (T::lit(9.0) * d).sqrt();
    loop {
        let x: T = StandardNormal.sample(rng);
        let v = T::one() + c * x;
        if v <= T::zero() {
            continue;
        }
        let v = v * v * v;
        let u: T = rng.random();
        let x2 = x * x;
        if u < T::one() - T::lit(0.0331) * x2 * x2
            || u.ln() < T::lit(0.5) * x2 + d * (T::one() - v + v.ln())
        {
            return (d * v).ln();
        }
    }
}

/// A `Gamma(shape, 1)` variate.
pub fn sample_gamma<T, R>(shape: T, rng: &mut R) -> T
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    sample_ln_gamma(shape, rng).exp()
}

fn draw<T, R>(alpha: &[T], rng: &mut R, buf: &mut Vec<T>)
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    buf.clear();
    buf.extend(alpha.iter().map(|&a| sample_ln_gamma(a, rng)));
    let top = buf.iter().copied().fold(T::neg_infinity(), T::max);
    for x in buf.iter_mut() {
        *x = (*x - top).exp();
    }
    let total: T = buf.iter().copied().sum();
    for x in buf.iter_mut() {
        *x /= total;
    }
}

/// Seeded stream of `Dir(alpha)` draws.
pub struct DirichletSampler<T> {
    params: DirichletParams<T>,
    rng: ChaCha8Rng,
}

impl<T> DirichletSampler<T>
where
    T: Real,
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    pub fn new(params: DirichletParams<T>, seed: u64) -> Self {
        Self {
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent sub-stream `stream` of the same seed.
    pub fn with_stream(params: DirichletParams<T>, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { params, rng }
    }

    pub fn next_point(&mut self) -> SimplexPoint<T> {
        let mut buf = Vec::with_capacity(self.params.k());
        draw(self.params.alpha(), &mut self.rng, &mut buf);
        SimplexPoint::from_normalized(buf)
    }

    fn fill(&mut self, buf: &mut Vec<T>) {
        draw(self.params.alpha(), &mut self.rng, buf);
    }
}

/// One `Dir(alpha)` draw, deterministic in `seed`.
pub fn sample<T>(params: &DirichletParams<T>, seed: u64) -> SimplexPoint<T>
where
    T: Real,
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    DirichletSampler::new(params.clone(), seed).next_point()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

impl MonteCarloEstimate {
    pub fn from_counts(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }

    /// `|estimate - value| <= sigmas * stderr`.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.estimate - value).abs() <= sigmas * self.stderr
    }
}

/// Fraction of `n_samples` Dirichlet draws with `t_i <= u_i` for every
/// `i < k`.
///
/// Samples are drawn in fixed blocks, each on its own ChaCha stream, so the
/// estimate does not depend on the thread count.
pub fn cdf_monte_carlo<T>(
    params: &DirichletParams<T>,
    u: &[T],
    n_samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate>
where
    T: Real,
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    ensure!(n_samples >= 1000, Domain, "need at least 1000 samples, got {n_samples}");
    ensure!(
        u.len() + 1 == params.k(),
        Domain,
        "rect has {} coordinates, expected {}",
        u.len(),
        params.k() - 1
    );
    let blocks = n_samples.div_ceil(MC_BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = MC_BLOCK.min(n_samples - b * MC_BLOCK);
            let mut s = DirichletSampler::with_stream(params.clone(), seed, b);
            let mut buf = Vec::with_capacity(params.k());
            let mut hits = 0u64;
            for _ in 0..len {
                s.fill(&mut buf);
                if buf.iter().zip(u).all(|(t, lim)| t <= lim) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(MonteCarloEstimate::from_counts(hits, n_samples))
}
