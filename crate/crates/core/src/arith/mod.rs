//! Integer-side multiplicative machinery: sieving, divisor functions, the
//! registry of weighted factorization models and factorization sampling.

pub mod cache;
mod divisor;
mod model;
mod sample;
mod sieve;

pub use divisor::{
    binomial, binomial_u128, compositions, indicator_squarefree, indicator_two_squares,
    rising_binomial, tau_k, tau_real,
};
pub use model::{ModelBounds, ModelKind, WeightModel, MAX_LOCAL_EXPONENT, RESIDUE_MODULI};
pub use sample::{sample_factorization, sample_factorization_with};
pub use sieve::{FactoredInteger, SpfSieve, MAX_SIEVE_LIMIT};
