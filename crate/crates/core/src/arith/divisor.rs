use num_bigint::BigUint;
use num_traits::One;

use super::FactoredInteger;
use crate::scalar::Scalar;

/// Exact binomial coefficient `C(n, r)`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::ZERO;
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, r)` in `u128`; panics on overflow, so only for small arguments.
pub fn binomial_u128(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// Number of ordered `k`-tuples with product `n`:
/// `prod_p C(v_p + k - 1, k - 1)`.
pub fn tau_k(n: &FactoredInteger, k: u32) -> BigUint {
    if k == 0 {
        return if n.n() == 1 { BigUint::one() } else { BigUint::ZERO };
    }
    n.exponents()
        .map(|v| binomial(v as u64 + k as u64 - 1, k as u64 - 1))
        .product()
}

/// `C(v + lambda - 1, v) = prod_{j=1}^{v} (lambda + j - 1) / j`.
pub fn rising_binomial<S: Scalar>(lambda: &S, v: u32) -> S {
    let mut acc = S::one();
    for j in 1..=v as u64 {
        acc = acc * (lambda.clone() + S::from_u64(j - 1)) / S::from_u64(j);
    }
    acc
}

/// Generalized divisor function `tau_lambda(n) = prod_p C(v_p + lambda - 1, v_p)`.
pub fn tau_real<S: Scalar>(n: &FactoredInteger, lambda: &S) -> S {
    n.exponents()
        .fold(S::one(), |acc, v| acc * rising_binomial(lambda, v))
}

/// 1 iff every prime `p = 3 (mod 4)` divides `n` to an even power.
pub fn indicator_two_squares(n: &FactoredInteger) -> u8 {
    u8::from(n.factors().iter().all(|&(p, v)| p % 4 != 3 || v % 2 == 0))
}

/// 1 iff `n` is squarefree.
pub fn indicator_squarefree(n: &FactoredInteger) -> u8 {
    u8::from(n.exponents().all(|v| v == 1))
}

/// All compositions `(v_1, ..., v_k)` of `v` into `k` non-negative parts,
/// in lexicographic order, flattened row-major.
pub fn compositions(v: u32, k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<u32>) {
        let k = cur.len();
        if pos + 1 == k {
            cur[pos] = left;
            out.extend_from_slice(cur);
            return;
        }
        for x in 0..=left {
            cur[pos] = x;
            rec(pos + 1, left - x, cur, out);
        }
    }
    if k == 0 {
        return out;
    }
    rec(0, v, &mut cur, &mut out);
    out
}
