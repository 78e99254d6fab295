use num_rational::Rational64;

use super::exact::exact_lhs_grid;
use super::histogram::{accumulate_histogram, empirical_cdf};
use crate::arith::{SpfSieve, WeightModel};
use crate::dirichlet::cdf_on_grid;
use crate::error::{ensure, Result};
use crate::grid::{DeviationReport, DeviationRow, RectGrid};

/// Largest `x` evaluated by the exact grid path in [`sup_deviation`].
pub const EXACT_GRID_LIMIT: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationOptions {
    /// Bins per dimension for the histogram path; `None` picks 2000, 400 or
    /// 100 for `k = 2`, `3`, larger.
    pub bins: Option<usize>,
    pub shards: usize,
    /// Quadrature tolerance for the limit CDF.
    pub tol: f64,
    /// `x` up to which the exact grid path is used.
    pub exact_limit: u64,
}

impl Default for DeviationOptions {
    fn default() -> Self {
        Self {
            bins: None,
            shards: rayon::current_num_threads(),
            tol: 1e-10,
            exact_limit: EXACT_GRID_LIMIT,
        }
    }
}

impl DeviationOptions {
    pub fn bins_for(&self, k: usize) -> usize {
        self.bins.unwrap_or(match k {
            2 => 2000,
            3 => 400,
            _ => 100,
        })
    }
}

/// Grid comparison of the left-hand side at `x` with the CDF of the model's
/// predicted law. `scaled_sup_dev = sup_dev * (log x)^min(1, alpha)`.
pub fn sup_deviation(
    x: u64,
    model: &WeightModel,
    step: Rational64,
    sieve: &SpfSieve,
    opts: &DeviationOptions,
) -> Result<DeviationReport> {
    let k = model.k();
    ensure!(k >= 2, Domain, "deviation reports need k >= 2");
    let grid = RectGrid::new(step, k - 1)?;
    let params = model.predicted_params()?;
    let points = grid.points();
    let empirical: Vec<f64> = if x <= opts.exact_limit {
        exact_lhs_grid::<f64>(x, model, &grid, sieve)?.values
    } else {
        let h = accumulate_histogram(x, model, opts.bins_for(k), opts.shards, sieve)?;
        points
            .iter()
            .map(|p| empirical_cdf(&h, p))
            .collect::<Result<_>>()?
    };
    let limits = cdf_on_grid(&params, &points, opts.tol)?;
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
    let exponent = params.alpha().iter().copied().fold(1.0f64, f64::min);
    let rate = (x as f64).ln().powf(exponent);
    Ok(DeviationReport::from_rows(
        "integers",
        x,
        k,
        &model.id(),
        step,
        rows,
        rate,
    ))
}

/// One [`sup_deviation`] report per `x`, in the given (ascending) order.
pub fn convergence_study(
    xs: &[u64],
    model: &WeightModel,
    step: Rational64,
    sieve: &SpfSieve,
    opts: &DeviationOptions,
) -> Result<Vec<DeviationReport>> {
    ensure!(!xs.is_empty(), Domain, "convergence study needs at least one x");
    ensure!(
        xs.windows(2).all(|w| w[0] < w[1]),
        Domain,
        "x values must be strictly ascending"
    );
    xs.iter()
        .map(|&x| sup_deviation(x, model, step, sieve, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::cdf_arcsine;

    #[test]
    fn hand_example_at_four() {
        let s = SpfSieve::build(10).unwrap();
        let m = WeightModel::uniform(2).unwrap();
        let r = sup_deviation(4, &m, Rational64::new(1, 4), &s, &DeviationOptions::default()).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!((r.sup_dev - 0.25).abs() < 1e-12);
        assert_eq!(r.argmax().unwrap().u, vec![0.25]);
        assert!(r.rows[2].deviation.abs() < 1e-12);
        assert!((r.rows[0].empirical - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn x_one_is_one_minus_cdf() {
        let s = SpfSieve::build(10).unwrap();
        let m = WeightModel::uniform(2).unwrap();
        let r = sup_deviation(1, &m, Rational64::new(1, 10), &s, &DeviationOptions::default()).unwrap();
        let expect = (1..10)
            .map(|i| 1.0 - cdf_arcsine(i as f64 / 10.0).unwrap())
            .fold(0.0, f64::max);
        assert!((r.sup_dev - expect).abs() < 1e-9);
    }

    #[test]
    fn histogram_path_close_to_exact_path() {
        let s = SpfSieve::build(50_000).unwrap();
        let m = WeightModel::uniform(2).unwrap();
        let step = Rational64::new(1, 20);
        let exact = sup_deviation(50_000, &m, step, &s, &DeviationOptions::default()).unwrap();
        let opts = DeviationOptions {
            exact_limit: 0,
            ..DeviationOptions::default()
        };
        let binned = sup_deviation(50_000, &m, step, &s, &opts).unwrap();
        for (a, b) in exact.rows.iter().zip(&binned.rows) {
            assert!((a.empirical - b.empirical).abs() < 2e-3, "{:?}", a.u);
        }
    }

    #[test]
    fn study_rejects_unsorted() {
        let s = SpfSieve::build(100).unwrap();
        let m = WeightModel::uniform(2).unwrap();
        let step = Rational64::new(1, 4);
        let opts = DeviationOptions::default();
        assert!(convergence_study(&[100, 10], &m, step, &s, &opts).is_err());
        assert_eq!(convergence_study(&[100], &m, step, &s, &opts).unwrap().len(), 1);
    }
}
