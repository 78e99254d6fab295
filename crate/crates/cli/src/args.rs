use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Dirichlet limit laws for k-part factorizations of integers, polynomials
/// over F_q and permutations.
#[derive(Debug, Parser)]
#[command(name = "dirlaw", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub kind: Kind,
}

#[derive(Debug, Subcommand)]
pub enum Kind {
    /// Density, CDF and sampler of Dir(alpha)
    Dirichlet {
        verb: DirichletVerb,
        #[command(flatten)]
        flags: Flags,
    },
    /// Factorizations of integers n <= x
    Integers {
        verb: IntegersVerb,
        #[command(flatten)]
        flags: Flags,
    },
    /// Factorizations of monic polynomials of degree n over F_q
    Polys {
        verb: PolysVerb,
        #[command(flatten)]
        flags: Flags,
    },
    /// Cycle-stable decompositions of permutations of n letters
    Perms {
        verb: PermsVerb,
        #[command(flatten)]
        flags: Flags,
    },
    /// The multiple Dirichlet series and its Euler product
    Series {
        verb: SeriesVerb,
        #[command(flatten)]
        flags: Flags,
    },
}

impl Kind {
    pub fn flags(&self) -> &Flags {
        match self {
            Kind::Dirichlet { flags, .. }
            | Kind::Integers { flags, .. }
            | Kind::Polys { flags, .. }
            | Kind::Perms { flags, .. }
            | Kind::Series { flags, .. } => flags,
        }
    }

    pub fn names(&self) -> (&'static str, String) {
        fn name(v: &impl ValueEnum) -> String {
            v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
        }
        match self {
            Kind::Dirichlet { verb, .. } => ("dirichlet", name(verb)),
            Kind::Integers { verb, .. } => ("integers", name(verb)),
            Kind::Polys { verb, .. } => ("polys", name(verb)),
            Kind::Perms { verb, .. } => ("perms", name(verb)),
            Kind::Series { verb, .. } => ("series", name(verb)),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DirichletVerb {
    Cdf,
    Density,
    Sample,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum IntegersVerb {
    Exact,
    Run,
    Mc,
    Converge,
    Lemma43,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolysVerb {
    Exact,
    Run,
    Converge,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PermsVerb {
    Exact,
    Brute,
    Converge,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SeriesVerb {
    Direct,
    Euler,
    A0,
    Primesum,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand; each verb reads the ones it needs.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Flags {
    /// Number of parts
    #[arg(long)]
    pub k: Option<usize>,
    /// Dirichlet parameters a1,a2,... (decimals or p/q)
    #[arg(long)]
    pub alpha: Option<String>,
    /// Rect corner u1,...,u_{k-1}, or a simplex point for `density`
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Bound x on the integers; a list for `converge` and `lemma43`, the
    /// prime cut-off for `euler` and `primesum`
    #[arg(long)]
    pub x: Option<String>,
    /// Degree, permutation size, truncation point or sample count; a list
    /// for `converge`
    #[arg(long)]
    pub n: Option<String>,
    /// Field size (prime)
    #[arg(long)]
    pub q: Option<u32>,
    /// Weight model: uniform, two-squares, squarefree, nested,
    /// tau-weights:<theta>;<l1>,..., residues:<q>, coprime[:i-j,...]
    #[arg(long)]
    pub model: Option<String>,
    /// Grid step for deviation reports
    #[arg(long)]
    pub grid: Option<String>,
    /// Histogram bins per dimension
    #[arg(long)]
    pub bins: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (default: stdout); a manifest is written next to it
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Quadrature tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Series point s1,s2,... with entries like 2, 1.5+3i or 2-0.5i
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    /// Exponent cut-off for Euler factors
    #[arg(long)]
    pub v: Option<u32>,
    /// Prime for the local leading-coefficient check
    #[arg(long)]
    pub p: Option<u64>,
    /// Coordinate (1-based) for `primesum`
    #[arg(long)]
    pub j: Option<usize>,
}
