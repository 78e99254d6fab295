use std::path::PathBuf;

use dirlaw_core::arith::cache::{cache_dir_from_env, load_or_build};
use dirlaw_core::arith::{SpfSieve, WeightModel};
use dirlaw_core::dirichlet::{self, DirichletSampler, SimplexPoint};
use dirlaw_core::grid::{parse_rational, parse_rational_list};
use dirlaw_core::integers::{
    convergence_study, exact_lhs, mc_lhs, sup_deviation, weighted_sum_s, DeviationOptions, EXACT_RATIONAL_LIMIT,
};
use dirlaw_core::perms::{deviation_perm, lhs_perm_brute, lhs_perm_exact, EXACT_PERM_LIMIT};
use dirlaw_core::polyfield::{deviation_poly, exact_lhs_poly, load_or_build_irr, IrreducibleTable};
use dirlaw_core::series::{a0_local_check, d_direct, d_euler, prime_sum_diag, SeriesPoint};
use dirlaw_core::{DirichletParams, Error, Rational, RectQuery, Result};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::args::{DirichletVerb, Flags, IntegersVerb, Kind, PermsVerb, PolysVerb, SeriesVerb};
use crate::report::{Body, Cell};

const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_MC_SAMPLES: u64 = 100_000;
const DEFAULT_EULER_V: u32 = 40;

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| Error::Domain(format!("--{flag} is required")))
}

fn parse_u64(s: &str, flag: &str) -> Result<u64> {
    let s = s.trim();
    s.parse::<u64>()
        .ok()
        .or_else(|| s.parse::<f64>().ok().filter(|x| x.fract() == 0.0 && *x >= 0.0 && *x < 1.9e19).map(|x| x as u64))
        .ok_or_else(|| Error::Domain(format!("--{flag}: '{s}' is not a non-negative integer")))
}

fn parse_u64_list(s: &str, flag: &str) -> Result<Vec<u64>> {
    s.split(',').map(|t| parse_u64(t, flag)).collect()
}

/// Reals given as decimals, `p/q` or in exponent notation.
fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.contains('/') {
        return parse_rational(s).map(|r| r.to_f64().unwrap_or(f64::NAN));
    }
    s.parse::<f64>().map_err(|_| Error::Domain(format!("cannot parse '{s}' as a real")))
}

fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_real).collect()
}

fn parse_complex_list(s: &str) -> Result<Vec<Complex64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<Complex64>()
                .or_else(|_| parse_real(t).map(|re| Complex64::new(re, 0.0)))
                .map_err(|_| Error::Domain(format!("cannot parse '{t}' as a complex number")))
        })
        .collect()
}

fn tol(flags: &Flags) -> f64 {
    flags.tol.unwrap_or(DEFAULT_TOL)
}

fn step(flags: &Flags) -> Result<Rational64> {
    flags.grid.as_deref().map_or(Ok(Rational64::new(1, 20)), parse_rational)
}

fn rect(flags: &Flags) -> Result<RectQuery> {
    RectQuery::new(parse_rational_list(required(&flags.u, "u")?)?)
}

fn k_or(flags: &Flags, default: usize) -> usize {
    flags.k.unwrap_or(default)
}

fn model(flags: &Flags) -> Result<WeightModel> {
    WeightModel::parse(flags.model.as_deref().unwrap_or("uniform"), flags.k)
}

fn cache_dir() -> Result<Option<PathBuf>> {
    cache_dir_from_env()
}

fn sieve(limit: u64) -> Result<SpfSieve> {
    load_or_build(limit.max(2), cache_dir()?.as_deref())
}

fn irreducibles(q: u32, n: u32) -> Result<IrreducibleTable> {
    load_or_build_irr(q, (n / 2).max(1), cache_dir()?.as_deref())
}

fn exact_or_float(r: Rational, exact: bool) -> Cell {
    if exact {
        Cell::Text(r.to_string())
    } else {
        Cell::Float(r.to_f64().unwrap_or(f64::NAN))
    }
}

pub fn execute(kind: &Kind) -> Result<Body> {
    match kind {
        Kind::Dirichlet { verb, flags } => dirichlet_cmd(*verb, flags),
        Kind::Integers { verb, flags } => integers_cmd(*verb, flags),
        Kind::Polys { verb, flags } => polys_cmd(*verb, flags),
        Kind::Perms { verb, flags } => perms_cmd(*verb, flags),
        Kind::Series { verb, flags } => series_cmd(*verb, flags),
    }
}

fn dirichlet_cmd(verb: DirichletVerb, flags: &Flags) -> Result<Body> {
    let params = DirichletParams::new(parse_real_list(required(&flags.alpha, "alpha")?)?)?;
    let k = params.k();
    match verb {
        DirichletVerb::Cdf => {
            let u = parse_real_list(required(&flags.u, "u")?)?;
            Ok(Body::Value(Cell::Float(dirichlet::cdf(&params, &u, tol(flags))?)))
        }
        DirichletVerb::Density => {
            let mut t = parse_real_list(required(&flags.u, "u")?)?;
            if t.len() + 1 == k {
                t.push(1.0 - t.iter().sum::<f64>());
            }
            if t.len() != k {
                return Err(Error::Domain(format!("--u needs {} or {k} coordinates", k - 1)));
            }
            let point = SimplexPoint::new(t)?;
            Ok(Body::Value(Cell::Float(dirichlet::density(&params, &point)?)))
        }
        DirichletVerb::Sample => {
            let count = flags.n.as_deref().map_or(Ok(1), |s| parse_u64(s, "n"))?;
            let mut sampler = DirichletSampler::new(params, flags.seed);
            let rows = (0..count)
                .map(|_| sampler.next_point().into_coords().into_iter().map(Cell::Float).collect())
                .collect();
            Ok(Body::Table {
                columns: (1..=k).map(|i| format!("t_{i}")).collect(),
                rows,
            })
        }
    }
}

fn deviation_options(flags: &Flags) -> DeviationOptions {
    DeviationOptions {
        bins: flags.bins,
        tol: tol(flags),
        ..DeviationOptions::default()
    }
}

fn histogram_bins(x: u64, k: usize, opts: &DeviationOptions) -> Option<usize> {
    (x > opts.exact_limit).then(|| opts.bins_for(k))
}

fn integers_cmd(verb: IntegersVerb, flags: &Flags) -> Result<Body> {
    let model = model(flags)?;
    let x_text = required(&flags.x, "x")?;
    match verb {
        IntegersVerb::Exact => {
            let x = parse_u64(x_text, "x")?;
            let r = rect(flags)?;
            let s = sieve(x)?;
            if x <= EXACT_RATIONAL_LIMIT {
                let v: Rational = exact_lhs(x, &model, &r, &s)?;
                Ok(Body::Value(exact_or_float(v, true)))
            } else {
                Ok(Body::Value(Cell::Float(exact_lhs::<f64>(x, &model, &r, &s)?)))
            }
        }
        IntegersVerb::Run => {
            let x = parse_u64(x_text, "x")?;
            let opts = deviation_options(flags);
            let report = sup_deviation(x, &model, step(flags)?, &sieve(x)?, &opts)?;
            Ok(Body::Deviation { bins: histogram_bins(x, model.k(), &opts), report })
        }
        IntegersVerb::Mc => {
            let x = parse_u64(x_text, "x")?;
            let samples = flags.n.as_deref().map_or(Ok(DEFAULT_MC_SAMPLES), |s| parse_u64(s, "n"))?;
            let est = mc_lhs(x, &model, &rect(flags)?, samples, flags.seed, &sieve(x)?)?;
            Ok(Body::Table {
                columns: vec!["estimate".into(), "stderr".into()],
                rows: vec![vec![Cell::Float(est.estimate), Cell::Float(est.stderr)]],
            })
        }
        IntegersVerb::Converge => {
            let xs = parse_u64_list(x_text, "x")?;
            let top = xs.iter().copied().max().unwrap_or(1);
            let opts = deviation_options(flags);
            let reports = convergence_study(&xs, &model, step(flags)?, &sieve(top)?, &opts)?;
            Ok(Body::Convergence { bins: histogram_bins(top, model.k(), &opts), reports })
        }
        IntegersVerb::Lemma43 => {
            let xs = parse_real_list(x_text)?;
            let top = xs.iter().copied().fold(1.0f64, f64::max).floor() as u64;
            let l = weighted_sum_s(&xs, &sieve(top)?)?;
            Ok(Body::Table {
                columns: vec!["s".into(), "main".into(), "residual_ratio".into()],
                rows: vec![vec![Cell::Float(l.s), Cell::Float(l.main), Cell::Float(l.residual_ratio)]],
            })
        }
    }
}

fn polys_cmd(verb: PolysVerb, flags: &Flags) -> Result<Body> {
    let q = *required(&flags.q, "q")?;
    let k = k_or(flags, 2);
    let n_text = required(&flags.n, "n")?;
    let degree = |s: &str| -> Result<u32> {
        u32::try_from(parse_u64(s, "n")?).map_err(|_| Error::Domain(format!("degree {s} too large")))
    };
    match verb {
        PolysVerb::Exact => {
            let n = degree(n_text)?;
            let v = exact_lhs_poly(q, n, k, &rect(flags)?, &irreducibles(q, n)?)?;
            Ok(Body::Value(exact_or_float(v, true)))
        }
        PolysVerb::Run => {
            let n = degree(n_text)?;
            let report = deviation_poly(q, n, k, step(flags)?, &irreducibles(q, n)?, tol(flags))?;
            Ok(Body::Deviation { report, bins: None })
        }
        PolysVerb::Converge => {
            let ns: Vec<u32> = n_text.split(',').map(degree).collect::<Result<_>>()?;
            let top = ns.iter().copied().max().unwrap_or(1);
            let table = irreducibles(q, top)?;
            let reports = ns
                .iter()
                .map(|&n| deviation_poly(q, n, k, step(flags)?, &table, tol(flags)))
                .collect::<Result<_>>()?;
            Ok(Body::Convergence { reports, bins: None })
        }
    }
}

fn perms_cmd(verb: PermsVerb, flags: &Flags) -> Result<Body> {
    let k = k_or(flags, 2);
    let n_text = required(&flags.n, "n")?;
    match verb {
        PermsVerb::Exact => {
            let n = parse_u64(n_text, "n")?;
            let r = rect(flags)?;
            if n <= EXACT_PERM_LIMIT {
                Ok(Body::Value(exact_or_float(lhs_perm_exact(n, k, &r)?, true)))
            } else {
                Ok(Body::Value(Cell::Float(lhs_perm_exact::<f64>(n, k, &r)?)))
            }
        }
        PermsVerb::Brute => {
            let n = parse_u64(n_text, "n")?;
            Ok(Body::Value(exact_or_float(lhs_perm_brute(n, k, &rect(flags)?)?, true)))
        }
        PermsVerb::Converge => {
            let ns = parse_u64_list(n_text, "n")?;
            let reports = ns
                .iter()
                .map(|&n| deviation_perm(n, k, step(flags)?, tol(flags)))
                .collect::<Result<_>>()?;
            Ok(Body::Convergence { reports, bins: None })
        }
    }
}

fn series_value(value: Complex64, tail: Option<f64>) -> Body {
    let mut columns = vec!["re".to_string(), "im".to_string()];
    let mut row = vec![Cell::Float(value.re), Cell::Float(value.im)];
    if let Some(t) = tail {
        columns.push("tail_bound".into());
        row.push(Cell::Float(t));
    }
    Body::Table { columns, rows: vec![row] }
}

fn series_cmd(verb: SeriesVerb, flags: &Flags) -> Result<Body> {
    let point = || -> Result<SeriesPoint> {
        let s = parse_complex_list(required(&flags.s, "s")?)?;
        match flags.k {
            Some(k) if s.len() == 1 => SeriesPoint::new(vec![s[0]; k]),
            Some(k) if s.len() != k => Err(Error::Domain(format!("--s has {} entries, k = {k}", s.len()))),
            _ => SeriesPoint::new(s),
        }
    };
    match verb {
        SeriesVerb::Direct => {
            let n = parse_u64(required(&flags.n, "n")?, "n")?;
            let v = d_direct(&point()?, n, &sieve(n)?)?;
            Ok(series_value(v.value, Some(v.tail_bound)))
        }
        SeriesVerb::Euler => {
            let p = parse_u64(required(&flags.x, "x")?, "x")?;
            let v = d_euler(&point()?, p, flags.v.unwrap_or(DEFAULT_EULER_V))?;
            Ok(series_value(v.value, Some(v.tail_bound)))
        }
        SeriesVerb::A0 => {
            let p = *required(&flags.p, "p")?;
            let v = a0_local_check(p, k_or(flags, 2), *required(&flags.v, "v")?)?;
            Ok(Body::Value(exact_or_float(v, true)))
        }
        SeriesVerb::Primesum => {
            let model = model(flags)?;
            let s = parse_complex_list(required(&flags.s, "s")?)?;
            if s.len() != 1 {
                return Err(Error::Domain("--s takes a single value for primesum".into()));
            }
            let j = flags.j.unwrap_or(1);
            if j == 0 {
                return Err(Error::Domain("--j is 1-based".into()));
            }
            let p = parse_u64(required(&flags.x, "x")?, "x")?;
            Ok(series_value(prime_sum_diag(&model, j - 1, s[0], p)?, None))
        }
    }
}
