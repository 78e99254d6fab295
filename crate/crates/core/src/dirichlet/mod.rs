//! The Dirichlet law `Dir(alpha_1, ..., alpha_k)` on the `(k-1)`-simplex:
//! density, box CDF by nested tanh-sinh quadrature, the arcsine closed form
//! for `k = 2`, and a seeded sampler.

pub mod gamma;
pub mod quadrature;
mod sampling;

pub use sampling::{cdf_monte_carlo, sample, sample_gamma, DirichletSampler, MonteCarloEstimate};

use crate::error::{ensure, Error, Result};
use crate::scalar::Real;
use quadrature::TanhSinh;

/// Largest number of integration variables `k - 1` handled by quadrature.
pub const MAX_QUADRATURE_DIM: usize = 4;

/// Parameter vector of `Dir(alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams<T> {
    alpha: Vec<T>,
}

impl<T: Real> DirichletParams<T> {
    pub fn new(alpha: Vec<T>) -> Result<Self> {
        ensure!(alpha.len() >= 2, Domain, "Dirichlet needs k >= 2, got {}", alpha.len());
        ensure!(
            alpha.iter().all(|&a| a > T::zero() && a.is_finite()),
            Domain,
            "Dirichlet parameters must be positive and finite"
        );
        Ok(Self { alpha })
    }

    /// `Dir(a, ..., a)` of dimension `k`.
    pub fn symmetric(k: usize, a: T) -> Result<Self> {
        Self::new(vec![a; k])
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    /// `Gamma(sum alpha) / prod Gamma(alpha_i)`.
    pub fn norm(&self) -> T {
        gamma::dirichlet_norm(&self.alpha)
    }

    pub fn mean(&self) -> Vec<T> {
        let total: T = self.alpha.iter().copied().sum();
        self.alpha.iter().map(|&a| a / total).collect()
    }
}

/// A point `(t_1, ..., t_k)` of the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint<T> {
    t: Vec<T>,
}

impl<T: Real> SimplexPoint<T> {
    pub fn new(t: Vec<T>) -> Result<Self> {
        ensure!(
            t.iter().all(|&x| x >= T::zero() && x <= T::one()),
            Domain,
            "simplex coordinates must lie in [0, 1]"
        );
        let total: T = t.iter().copied().sum();
        ensure!(
            (total - T::one()).abs() <= T::lit(1e-12).max(T::epsilon() * T::lit(8.0)),
            Domain,
            "simplex coordinates sum to {:?}, not 1",
            total
        );
        Ok(Self { t })
    }

    pub(crate) fn from_normalized(t: Vec<T>) -> Self {
        Self { t }
    }

    pub fn coords(&self) -> &[T] {
        &self.t
    }

    pub fn into_coords(self) -> Vec<T> {
        self.t
    }
}

/// Density of `Dir(alpha)` at a simplex point.
pub fn density<T: Real>(params: &DirichletParams<T>, point: &SimplexPoint<T>) -> Result<T> {
    ensure!(
        point.coords().len() == params.k(),
        Domain,
        "point has {} coordinates, parameters have {}",
        point.coords().len(),
        params.k()
    );
    let mut value = params.norm();
    for (&t, &a) in point.coords().iter().zip(params.alpha()) {
        if t == T::zero() {
            if a < T::one() {
                return Err(Error::Singular(format!(
                    "density diverges on the boundary for alpha = {a:?} < 1"
                )));
            }
            if a > T::one() {
                return Ok(T::zero());
            }
            continue;
        }
        value *= t.powf(a - T::one());
    }
    Ok(value)
}

/// `(2/pi) arcsin(sqrt(u))`, the CDF of `Dir(1/2, 1/2)`.
pub fn cdf_arcsine<T: Real>(u: T) -> Result<T> {
    ensure!(u >= T::zero() && u <= T::one(), Domain, "u = {u:?} outside [0, 1]");
    Ok(T::FRAC_2_PI() * u.sqrt().asin())
}

fn check_tol<T: Real>(tol: T) -> Result<()> {
    ensure!(
        tol >= T::lit(1e-12) && tol <= T::lit(1e-3),
        Domain,
        "tolerance {tol:?} outside [1e-12, 1e-3]"
    );
    Ok(())
}

/// `F_alpha(u_1, ..., u_{k-1})`: the mass of `Dir(alpha)` on the box
/// `[0,u_1] x ... x [0,u_{k-1}]` (with `t_k = 1 - sum t_i`).
pub fn cdf<T: Real>(params: &DirichletParams<T>, u: &[T], tol: T) -> Result<T> {
    let dim = params.k() - 1;
    ensure!(
        u.len() == dim,
        Domain,
        "rect has {} coordinates, expected k - 1 = {dim}",
        u.len()
    );
    ensure!(
        dim <= MAX_QUADRATURE_DIM,
        Unsupported,
        "quadrature CDF supports k - 1 <= {MAX_QUADRATURE_DIM}, got {dim}; use Monte Carlo"
    );
    check_tol(tol)?;
    ensure!(u.iter().all(|&x| x >= T::zero()), Domain, "rect coordinates must be non-negative");
    let total: T = u.iter().copied().sum();
    ensure!(
        total <= T::one() + T::lit(1e-12),
        Domain,
        "rect coordinates sum to {total:?} > 1"
    );
    if u.iter().any(|&x| x == T::zero()) {
        return Ok(T::zero());
    }
    let value = nested_mass(params, u, tol);
    Ok(value.max(T::zero()).min(T::one()))
}

/// [`cdf`] at every point of a grid, evaluated in parallel.
pub fn cdf_on_grid(
    params: &DirichletParams<f64>,
    points: &[crate::grid::RectQuery],
    tol: f64,
) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    points.par_iter().map(|p| cdf(params, &p.as_f64(), tol)).collect()
}

/// Mass of `Dir(alpha)` over the whole simplex, by the same nested scheme
/// with every upper limit clipped to the remaining mass. Equals 1 up to the
/// quadrature error.
pub fn simplex_mass<T: Real>(params: &DirichletParams<T>, tol: T) -> Result<T> {
    let dim = params.k() - 1;
    ensure!(
        dim <= MAX_QUADRATURE_DIM,
        Unsupported,
        "quadrature supports k - 1 <= {MAX_QUADRATURE_DIM}, got {dim}"
    );
    check_tol(tol)?;
    Ok(nested_mass(params, &vec![T::one(); dim], tol))
}

fn nested_mass<T: Real>(params: &DirichletParams<T>, upper: &[T], tol: T) -> T {
    let levels = T::lit(upper.len() as f64);
    let quad = TanhSinh::new(tol / (T::lit(4.0) * levels), T::min_positive_value());
    params.norm() * nested_level(params.alpha(), upper, 0, T::one(), &quad)
}

/// Integral over `t_level, ..., t_{k-1}` given the remaining mass `rem`.
///
/// Variables with `alpha < 1` are integrated in `w = t^alpha`, which turns
/// `t^(alpha-1) dt` into `dw / alpha`; the face factor
/// `(1 - sum t)^(alpha_k - 1)` stays singular and is left to tanh-sinh.
fn nested_level<T: Real>(alpha: &[T], upper: &[T], level: usize, rem: T, quad: &TanhSinh<T>) -> T {
    let last = alpha[alpha.len() - 1];
    if rem <= T::zero() {
        // only reached through underflow at a face node
        return T::zero();
    }
    if level == upper.len() {
        return rem.powf(last - T::one());
    }
    let a = alpha[level];
    let (cap, gap) = if upper[level] >= rem {
        (rem, T::zero())
    } else {
        (upper[level], rem - upper[level])
    };
    if cap <= T::zero() {
        return T::zero();
    }
    if a < T::one() {
        let inv = T::one() / a;
        let w_cap = cap.powf(a);
        let q = quad.integrate(T::zero(), w_cap, |_, _, to_cap| {
            // cap - t with t = w^(1/a), w = w_cap - to_cap
            let shortfall = -cap * (inv * (-to_cap / w_cap).ln_1p()).exp_m1();
            inv * nested_level(alpha, upper, level + 1, gap + shortfall, quad)
        });
        q.value
    } else {
        let q = quad.integrate(T::zero(), cap, |_, t, to_cap| {
            t.powf(a - T::one()) * nested_level(alpha, upper, level + 1, gap + to_cap, quad)
        });
        q.value
    }
}
