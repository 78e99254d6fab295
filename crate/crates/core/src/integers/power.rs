//! Comparisons `d^b` against `n^a` for `1 <= d <= n`.
//!
//! Logs decide the clear cases; near-ties fall back to exact big-integer
//! powers so that boundary divisors (`d = n^u` exactly) land on a fixed side.

use std::cmp::Ordering;

use num_bigint::BigUint;

/// Relative gap below which the float comparison is not trusted; the logs
/// are accurate to a few ulps, so only genuine ties (`d` and `n` powers of a
/// common base) get this close.
const TIE_EPS: f64 = 1e-11;

/// Largest exponent used in exact power comparisons.
const MAX_EXACT_EXPONENT: u64 = 1 << 14;

fn exact_cmp(d: u64, b: u64, n: u64, a: u64) -> Ordering {
    let lhs = BigUint::from(d).pow(b as u32);
    let rhs = BigUint::from(n).pow(a as u32);
    lhs.cmp(&rhs)
}

/// Compares `d^b` with `n^a`.
fn cmp_power(d: u64, b: u64, n: u64, a: u64) -> Ordering {
    if d == 1 || b == 0 {
        return if n == 1 || a == 0 { Ordering::Equal } else { Ordering::Less };
    }
    if n == 1 || a == 0 {
        return Ordering::Greater;
    }
    if d == n {
        return b.cmp(&a);
    }
    let lhs = b as f64 * (d as f64).ln();
    let rhs = a as f64 * (n as f64).ln();
    let gap = lhs - rhs;
    if gap.abs() > TIE_EPS * lhs.max(rhs) {
        return if gap < 0.0 { Ordering::Less } else { Ordering::Greater };
    }
    if a <= MAX_EXACT_EXPONENT && b <= MAX_EXACT_EXPONENT {
        exact_cmp(d, b, n, a)
    } else {
        Ordering::Equal
    }
}

/// `d <= n^(a/b)`, i.e. `d^b <= n^a`.
pub fn leq_power(d: u64, n: u64, a: u64, b: u64) -> bool {
    if a >= b {
        return d <= n;
    }
    cmp_power(d, b, n, a) != Ordering::Greater
}

/// Smallest `g >= 0` with `d <= n^(g a / b)`; `None` when `d > 1 = n`.
pub fn min_grid_index(d: u64, n: u64, a: u64, b: u64) -> Option<u64> {
    if d == 1 {
        return Some(0);
    }
    if n == 1 {
        return None;
    }
    if d == n {
        return Some(b.div_ceil(a));
    }
    let t = (b as f64 * (d as f64).ln()) / (a as f64 * (n as f64).ln());
    let m = t.round();
    if (t - m).abs() < TIE_EPS * t.max(1.0) && m >= 1.0 {
        let m = m as u64;
        // d^b <= n^(m a)?
        let ok = if m * a <= MAX_EXACT_EXPONENT && b <= MAX_EXACT_EXPONENT {
            exact_cmp(d, b, n, m * a) != Ordering::Greater
        } else {
            true
        };
        return Some(if ok { m } else { m + 1 });
    }
    Some(t.ceil() as u64)
}

/// Bin of `log d / log n` among `bins` equal bins of `[0, 1]`: the largest
/// `j` with `j / bins <= log d / log n`, capped at `bins - 1`.
pub fn bin_index(d: u64, n: u64, bins: u64) -> u64 {
    if d == 1 || n == 1 {
        return 0;
    }
    if d == n {
        return bins - 1;
    }
    let t = bins as f64 * (d as f64).ln() / (n as f64).ln();
    let m = t.round();
    let j = if (t - m).abs() < TIE_EPS * t.max(1.0) {
        let m = m as u64;
        // n^m <= d^bins?
        let ok = if m <= MAX_EXACT_EXPONENT && bins <= MAX_EXACT_EXPONENT {
            exact_cmp(n, m, d, bins) != Ordering::Greater
        } else {
            true
        };
        if ok {
            m
        } else {
            m - 1
        }
    } else {
        t.floor() as u64
    };
    j.min(bins - 1)
}
