//! Lanczos approximation of the gamma function (g = 7, nine coefficients).

use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Real>(x: T) -> T {
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (x + T::lit(i as f64));
    }
    acc
}

/// Gamma function for real arguments that are not non-positive integers.
pub fn gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    let x = x - T::one();
    let t = x + T::lit(LANCZOS_G) + half;
    let sqrt_two_pi = (T::lit(2.0) * T::PI()).sqrt();
    // split the power to delay overflow for large x
    let p = t.powf((x + half) / T::lit(2.0));
    sqrt_two_pi * p * ((-t).exp() * p) * lanczos_sum(x)
}

/// Natural logarithm of `|Gamma(x)|`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let t = x + T::lit(LANCZOS_G) + half;
    let ln_sqrt_two_pi = T::lit(0.918_938_533_204_672_8);
    ln_sqrt_two_pi + (x + half) * t.ln() - t + lanczos_sum(x).ln()
}

/// `Gamma(sum a) / prod Gamma(a_i)`, the Dirichlet normalizing constant.
pub fn dirichlet_norm<T: Real>(alpha: &[T]) -> T {
    let total: T = alpha.iter().copied().sum();
    if total <= T::lit(100.0) && alpha.iter().all(|&a| a <= T::lit(100.0)) {
        let denom = alpha.iter().fold(T::one(), |acc, &a| acc * gamma(a));
        gamma(total) / denom
    } else {
        let ln = ln_gamma(total) - alpha.iter().map(|&a| ln_gamma(a)).sum::<T>();
        ln.exp()
    }
}
