//! Scalar abstractions shared by every engine.
//!
//! The combinatorial engines (weight models, exact left-hand sides, Stirling
//! sums) only need field operations, so they are generic over [`Scalar`],
//! which covers `f32`, `f64` and the exact [`BigRational`]. The analytic
//! pieces (gamma function, quadrature, sampling, complex series) need
//! transcendental functions and are generic over [`Real`] instead.

use std::fmt::Debug;
use std::iter::Sum;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, NumOps, One, ToPrimitive, Zero};

/// A field element usable by the combinatorial engines.
pub trait Scalar:
    Clone + Debug + PartialOrd + Zero + One + NumOps + Send + Sync + 'static
{
    /// `num / den`, with `den != 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &Rational64) -> Self {
        Self::from_ratio(*r.numer(), *r.denom())
    }

    fn from_u64(n: u64) -> Self;

    fn from_biguint(n: &BigUint) -> Self;

    fn to_f64(&self) -> f64;

    /// Nearest value to `x` (exact for rationals, since every finite double is one).
    fn approx_from_f64(x: f64) -> Self;

    /// Whether values of this type are exact (no rounding on field ops).
    const EXACT: bool;
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_u64(n: u64) -> Self {
        n as f64
    }
    fn from_biguint(n: &BigUint) -> Self {
        n.to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn approx_from_f64(x: f64) -> Self {
        x
    }
    const EXACT: bool = false;
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn from_u64(n: u64) -> Self {
        n as f32
    }
    fn from_biguint(n: &BigUint) -> Self {
        n.to_f32().unwrap_or(f32::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn approx_from_f64(x: f64) -> Self {
        x as f32
    }
    const EXACT: bool = false;
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_biguint(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn approx_from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }
    const EXACT: bool = true;
}

/// A floating-point scalar with transcendental functions.
pub trait Real: Scalar + Float + FloatConst + FromPrimitive + NumAssign + Sum + Copy {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Sum of a slice of scalars in index order.
pub fn ordered_sum<S: Scalar>(items: impl IntoIterator<Item = S>) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}

/// Neumaier-compensated running sum for floating-point accumulation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_from_ratio_normalizes() {
        let r = BigRational::from_ratio(6, -8);
        assert_eq!(r, BigRational::new((-3).into(), 4.into()));
        assert_eq!(Scalar::to_f64(&r), -0.75);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut c = Compensated::default();
        c.add(1.0);
        for _ in 0..10 {
            c.add(1e-17);
        }
        c.add(-1.0);
        assert!((c.value() - 1e-16).abs() < 1e-30);
    }
}
