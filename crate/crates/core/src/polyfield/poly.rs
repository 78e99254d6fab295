use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

use crate::arith::binomial;
use crate::error::{ensure, Result};

fn is_prime(q: u32) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Polynomial over the prime field `F_q`, coefficients lowest degree first,
/// with no trailing zeros (the zero polynomial has no coefficients).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyQ {
    q: u32,
    coeffs: Vec<u32>,
}

impl PolyQ {
    pub fn new(q: u32, mut coeffs: Vec<u32>) -> Result<Self> {
        ensure!(is_prime(q) && q < 1 << 16, Domain, "q = {q} is not a prime below 2^16");
        ensure!(
            coeffs.iter().all(|&c| c < q),
            Domain,
            "coefficients must lie in [0, {q})"
        );
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(Self { q, coeffs })
    }

    pub(crate) fn from_trimmed(q: u32, coeffs: Vec<u32>) -> Self {
        debug_assert!(coeffs.last() != Some(&0));
        Self { q, coeffs }
    }

    /// Polynomial whose base-`q` digits (lowest first) are the coefficients.
    pub fn from_code(q: u32, mut code: u64) -> Result<Self> {
        let mut coeffs = Vec::new();
        while code > 0 {
            coeffs.push((code % q as u64) as u32);
            code /= q as u64;
        }
        Self::new(q, coeffs)
    }

    pub fn one(q: u32) -> Result<Self> {
        Self::new(q, vec![1])
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// Base-`q` code; monic polynomials of degree `d` occupy `[q^d, 2 q^d)`.
    pub fn code(&self) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.q as u64 + c as u64)
    }
}

impl PartialOrd for PolyQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by degree, then by code.
impl Ord for PolyQ {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.q, self.coeffs.len(), self.code()).cmp(&(other.q, other.coeffs.len(), other.code()))
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

fn inv_mod(a: u32, q: u32) -> u32 {
    // Fermat: a^(q-2)
    let (mut base, mut exp, mut acc) = (a as u64 % q as u64, q as u64 - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q as u64;
        }
        base = base * base % q as u64;
        exp >>= 1;
    }
    acc as u32
}

pub(crate) fn mul_coeffs(a: &[u32], b: &[u32], q: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x as u64 * y as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|c| (c % q as u64) as u32).collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// In-place division of `a` by the monic `b`; returns the quotient and leaves
/// the remainder in `a`.
pub(crate) fn divrem_monic(a: &mut Vec<u32>, b: &[u32], q: u32) -> Vec<u32> {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return Vec::new();
    }
    let mut quot = vec![0u32; a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = a[i + db];
        if c == 0 {
            continue;
        }
        quot[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            let sub = (c as u64 * bj as u64) % q as u64;
            a[i + j] = ((a[i + j] as u64 + q as u64 - sub) % q as u64) as u32;
        }
    }
    while a.last() == Some(&0) {
        a.pop();
    }
    quot
}

fn same_field(a: &PolyQ, b: &PolyQ) -> Result<()> {
    ensure!(a.q == b.q, Domain, "polynomials over F_{} and F_{}", a.q, b.q);
    Ok(())
}

pub fn poly_mul(a: &PolyQ, b: &PolyQ) -> Result<PolyQ> {
    same_field(a, b)?;
    Ok(PolyQ::from_trimmed(a.q, mul_coeffs(&a.coeffs, &b.coeffs, a.q)))
}

/// `(quotient, remainder)` with `deg rem < deg b`.
pub fn poly_divrem(a: &PolyQ, b: &PolyQ) -> Result<(PolyQ, PolyQ)> {
    same_field(a, b)?;
    ensure!(!b.is_zero(), Domain, "division by the zero polynomial");
    let q = a.q;
    let lead_inv = inv_mod(*b.coeffs.last().unwrap_or(&1), q);
    let monic_b: Vec<u32> = b
        .coeffs
        .iter()
        .map(|&c| (c as u64 * lead_inv as u64 % q as u64) as u32)
        .collect();
    let mut rem = a.coeffs.clone();
    let mut quot = divrem_monic(&mut rem, &monic_b, q);
    for c in quot.iter_mut() {
        *c = (*c as u64 * lead_inv as u64 % q as u64) as u32;
    }
    while quot.last() == Some(&0) {
        quot.pop();
    }
    Ok((PolyQ::from_trimmed(q, quot), PolyQ::from_trimmed(q, rem)))
}

/// A monic polynomial with its factorization into monic irreducibles,
/// ordered by (degree, code).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredPoly {
    pub(crate) poly: PolyQ,
    pub(crate) factors: Vec<(PolyQ, u32)>,
}

impl FactoredPoly {
    pub fn poly(&self) -> &PolyQ {
        &self.poly
    }

    pub fn factors(&self) -> &[(PolyQ, u32)] {
        &self.factors
    }

    /// Product of the factor powers.
    pub fn expand(&self) -> Result<PolyQ> {
        let mut acc = PolyQ::one(self.poly.q)?;
        for (p, e) in &self.factors {
            for _ in 0..*e {
                acc = poly_mul(&acc, p)?;
            }
        }
        Ok(acc)
    }
}

/// Ordered `k`-tuples of monic divisors with product `F`:
/// `prod C(e + k - 1, k - 1)` over the irreducible factors.
pub fn tau_k_poly(fp: &FactoredPoly, k: u32) -> BigUint {
    fp.factors
        .iter()
        .map(|&(_, e)| binomial(e as u64 + k as u64 - 1, k as u64 - 1))
        .product()
}
