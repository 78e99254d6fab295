//! Rectangle queries, evaluation grids and deviation reports.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{ensure, Error, Result};

/// Upper corner `(u_1, ..., u_{k-1})` of the box `[0,u_1] x ... x [0,u_{k-1}]`.
///
/// Coordinates are kept as exact rationals so that the integral constraints
/// (`deg D <= floor(n u)`, `|A| <= floor(n u)`, `d^b <= n^a`) never depend on
/// floating-point rounding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RectQuery {
    u: Vec<Rational64>,
}

impl RectQuery {
    pub fn new(u: Vec<Rational64>) -> Result<Self> {
        ensure!(!u.is_empty(), Domain, "rect query needs at least one coordinate");
        ensure!(
            u.iter().all(|x| !x.is_negative()),
            Domain,
            "rect coordinates must be non-negative"
        );
        let total: Rational64 = u.iter().copied().sum();
        ensure!(total <= Rational64::one(), Domain, "rect coordinates sum to {total} > 1");
        Ok(Self { u })
    }

    /// Builds a query without the `sum <= 1` check (coordinates are still
    /// required to be non-negative). Used for clamped empirical queries.
    pub fn unbounded(u: Vec<Rational64>) -> Result<Self> {
        ensure!(
            u.iter().all(|x| !x.is_negative()),
            Domain,
            "rect coordinates must be non-negative"
        );
        Ok(Self { u })
    }

    pub fn from_f64(u: &[f64]) -> Result<Self> {
        let u = u
            .iter()
            .map(|&x| {
                Rational64::approximate_float(x)
                    .ok_or_else(|| Error::Domain(format!("cannot represent {x} as a rational")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(u)
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn coords(&self) -> &[Rational64] {
        &self.u
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.u.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// `floor(n * u_i)` for every coordinate.
    pub fn floor_scaled(&self, n: u64) -> Vec<u64> {
        self.u
            .iter()
            .map(|r| {
                let num = *r.numer() as i128 * n as i128;
                Integer::div_floor(&num, &(*r.denom() as i128)) as u64
            })
            .collect()
    }
}

/// Parses `p/q`, a decimal such as `0.125`, or an integer into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Domain(format!("cannot parse '{s}' as a rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        ensure!(q != 0, Domain, "zero denominator in '{s}'");
        return Ok(Rational64::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    ensure!(
        !(int_part.is_empty() && frac_part.is_empty())
            && int_part.chars().all(|c| c.is_ascii_digit())
            && frac_part.chars().all(|c| c.is_ascii_digit())
            && frac_part.len() <= 15,
        Domain,
        "cannot parse '{s}' as a rational"
    );
    let digits = format!("{int_part}{frac_part}");
    let num: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let den = 10i64.checked_pow(frac_part.len() as u32).ok_or_else(bad)?;
    let r = Rational64::new(num, den);
    Ok(if neg { -r } else { r })
}

pub fn parse_rational_list(s: &str) -> Result<Vec<Rational64>> {
    s.split(',').map(parse_rational).collect()
}

/// Regular grid of interior rect corners.
///
/// Every coordinate runs over `step, 2*step, ...` strictly below 1, and only
/// points with coordinate sum at most 1 are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectGrid {
    step: Rational64,
    dim: usize,
}

impl RectGrid {
    pub fn new(step: Rational64, dim: usize) -> Result<Self> {
        ensure!(dim >= 1, Domain, "grid dimension must be at least 1");
        ensure!(
            step >= Rational64::new(1, 100) && step <= Rational64::new(1, 2),
            Domain,
            "grid step {step} outside [0.01, 0.5]"
        );
        Ok(Self { step, dim })
    }

    pub fn step(&self) -> Rational64 {
        self.step
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest grid index strictly below 1.
    pub fn max_index(&self) -> i64 {
        let m = (Rational64::one() / self.step).ceil().to_integer();
        m - 1
    }

    /// Grid points as index vectors `(g_1, ..., g_dim)`, `u_i = g_i * step`,
    /// in lexicographic order.
    pub fn index_points(&self) -> Vec<Vec<i64>> {
        let max = self.max_index();
        let limit = (Rational64::one() / self.step).floor().to_integer();
        let mut out = Vec::new();
        let mut cur = vec![1i64; self.dim];
        if max < 1 {
            return out;
        }
        loop {
            if cur.iter().sum::<i64>() <= limit {
                out.push(cur.clone());
            }
            let mut pos = self.dim;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if cur[pos] < max {
                    cur[pos] += 1;
                    for c in cur.iter_mut().skip(pos + 1) {
                        *c = 1;
                    }
                    break;
                }
            }
        }
    }

    pub fn points(&self) -> Vec<RectQuery> {
        self.index_points()
            .into_iter()
            .map(|g| RectQuery {
                u: g.into_iter().map(|i| self.step * i).collect(),
            })
            .collect()
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRow {
    pub u: Vec<f64>,
    pub empirical: f64,
    pub limit: f64,
    pub deviation: f64,
}

/// Grid comparison of an empirical left-hand side against a Dirichlet CDF.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub kind: String,
    /// `x` for integers, `n` for polynomials and permutations.
    pub scale: u64,
    pub k: usize,
    pub model: String,
    pub grid_step: f64,
    pub rows: Vec<DeviationRow>,
    pub sup_dev: f64,
    pub scaled_sup_dev: f64,
}

impl DeviationReport {
    /// Assembles a report; `rate` is the factor multiplying `sup_dev` in
    /// `scaled_sup_dev`.
    pub fn from_rows(
        kind: &str,
        scale: u64,
        k: usize,
        model: &str,
        grid_step: Rational64,
        rows: Vec<DeviationRow>,
        rate: f64,
    ) -> Self {
        let sup_dev = rows.iter().map(|r| r.deviation.abs()).fold(0.0, f64::max);
        Self {
            kind: kind.to_string(),
            scale,
            k,
            model: model.to_string(),
            grid_step: grid_step.to_f64().unwrap_or(f64::NAN),
            rows,
            sup_dev,
            scaled_sup_dev: sup_dev * rate,
        }
    }

    /// Row attaining the sup (first in grid order on ties).
    pub fn argmax(&self) -> Option<&DeviationRow> {
        let mut best: Option<&DeviationRow> = None;
        for r in &self.rows {
            if best.is_none_or(|b| r.deviation.abs() > b.deviation.abs()) {
                best = Some(r);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_rational("1/3").unwrap(), r(1, 3));
        assert_eq!(parse_rational("2").unwrap(), r(2, 1));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert_eq!(parse_rational("-0.05").unwrap(), r(-1, 20));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn rect_rejects_oversized_sum() {
        assert!(RectQuery::new(vec![r(1, 2), r(2, 3)]).is_err());
        assert!(RectQuery::new(vec![r(-1, 2)]).is_err());
        assert!(RectQuery::new(vec![r(1, 2), r(1, 2)]).is_ok());
    }

    #[test]
    fn floor_scaled_is_exact() {
        let q = RectQuery::new(vec![r(1, 3), r(1, 2)]).unwrap();
        assert_eq!(q.floor_scaled(9), vec![3, 4]);
        assert_eq!(q.floor_scaled(10), vec![3, 5]);
    }

    #[test]
    fn one_dimensional_grid_is_interior() {
        let g = RectGrid::new(r(1, 4), 1).unwrap();
        let pts: Vec<_> = g.points().iter().map(|p| p.as_f64()[0]).collect();
        assert_eq!(pts, vec![0.25, 0.5, 0.75]);
        let g = RectGrid::new(r(1, 2), 1).unwrap();
        assert_eq!(g.points().len(), 1);
    }

    #[test]
    fn two_dimensional_grid_respects_simplex() {
        let g = RectGrid::new(r(1, 4), 2).unwrap();
        let pts = g.index_points();
        assert!(pts.iter().all(|p| p.iter().sum::<i64>() <= 4));
        assert!(pts.contains(&vec![1, 3]));
        assert!(pts.contains(&vec![2, 2]));
        assert!(!pts.contains(&vec![3, 2]));
        assert_eq!(pts.len(), 6);
    }

    #[test]
    fn non_dividing_step() {
        let g = RectGrid::new(r(3, 10), 1).unwrap();
        let pts: Vec<_> = g.points().iter().map(|p| p.coords()[0]).collect();
        assert_eq!(pts, vec![r(3, 10), r(3, 5), r(9, 10)]);
    }
}
