//! Left-hand sides of the integer limit laws: exact sums over `n <= x`,
//! deterministic binning for larger `x`, deviation reports, the weighted
//! divisor sum probe and a Monte Carlo estimator.

mod deviation;
mod enumerate;
mod exact;
mod histogram;
mod lemma43;
mod mc;
mod power;

pub use deviation::{convergence_study, sup_deviation, DeviationOptions, EXACT_GRID_LIMIT};
pub use enumerate::{LocalData, LocalTable};
pub use exact::{exact_lhs, exact_lhs_grid, GridLhs, EXACT_RATIONAL_LIMIT};
pub use histogram::{accumulate_histogram, empirical_cdf, HistogramGrid, MAX_HISTOGRAM_CELLS};
pub use lemma43::{lemma43_main_term, weighted_sum_s, Lemma43, LEMMA43_MAX_PRODUCT};
pub use mc::mc_lhs;
pub use power::{bin_index, leq_power, min_grid_index};
