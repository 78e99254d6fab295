use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive};

use super::divisor::{binomial_u128, compositions, rising_binomial};
use super::FactoredInteger;
use crate::dirichlet::DirichletParams;
use crate::error::{ensure, Error, Result};
use crate::grid::{parse_rational, parse_rational_list};
use crate::scalar::Scalar;

/// Moduli accepted by the `residues` model.
pub const RESIDUE_MODULI: [u64; 4] = [3, 4, 5, 8];

/// Largest prime-power exponent handled by the local sums.
pub const MAX_LOCAL_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelKind {
    Uniform,
    TauWeights {
        theta: Rational64,
        lambda: Vec<Rational64>,
    },
    Residues {
        q: u64,
        classes: Vec<u64>,
    },
    TwoSquares,
    Squarefree,
    Coprime {
        /// Unordered 1-based pairs allowed to share a prime.
        pairs: Vec<(usize, usize)>,
    },
    Nested,
}

/// Declared growth parameters `(beta, c, delta)`; recorded, not verified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelBounds {
    pub beta: f64,
    pub c: f64,
    pub delta: f64,
}

/// A multiplicative pair `(f; G)` on `k` coordinates, given by its values on
/// prime powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightModel {
    kind: ModelKind,
    k: usize,
    /// `share[i][j]`: coordinates `i` and `j` may both be divisible by a prime.
    share: Vec<Vec<bool>>,
}

fn euler_phi(q: u64) -> u64 {
    (1..=q).filter(|&a| num_integer::gcd(a, q) == 1).count() as u64
}

fn fmt_rational(r: &Rational64) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl WeightModel {
    fn with_kind(kind: ModelKind, k: usize) -> Result<Self> {
        ensure!((1..=8).contains(&k), Domain, "k = {k} outside 1..=8");
        let mut share = vec![vec![true; k]; k];
        if let ModelKind::Coprime { pairs } = &kind {
            for (i, row) in share.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell = i == j;
                }
            }
            for &(i, j) in pairs {
                share[i - 1][j - 1] = true;
                share[j - 1][i - 1] = true;
            }
        }
        Ok(Self { kind, k, share })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::with_kind(ModelKind::Uniform, k)
    }

    pub fn two_squares(k: usize) -> Result<Self> {
        Self::with_kind(ModelKind::TwoSquares, k)
    }

    pub fn squarefree(k: usize) -> Result<Self> {
        Self::with_kind(ModelKind::Squarefree, k)
    }

    pub fn nested(k: usize) -> Result<Self> {
        ensure!(k >= 2, Domain, "nested model needs k >= 2");
        Self::with_kind(ModelKind::Nested, k)
    }

    /// `k = lambda.len()`.
    pub fn tau_weights(theta: Rational64, lambda: Vec<Rational64>) -> Result<Self> {
        ensure!(theta.is_positive(), Domain, "theta must be positive");
        ensure!(
            lambda.iter().all(|l| l.is_positive()),
            Domain,
            "every lambda must be positive"
        );
        let k = lambda.len();
        Self::with_kind(ModelKind::TauWeights { theta, lambda }, k)
    }

    /// `k = phi(q)`, coordinates assigned to the reduced residues in
    /// ascending order.
    pub fn residues(q: u64) -> Result<Self> {
        ensure!(
            RESIDUE_MODULI.contains(&q),
            Unsupported,
            "residues model supports q in {RESIDUE_MODULI:?}, got {q}"
        );
        let classes: Vec<u64> = (1..q).filter(|&a| num_integer::gcd(a, q) == 1).collect();
        let k = classes.len();
        debug_assert_eq!(k as u64, euler_phi(q));
        Self::with_kind(ModelKind::Residues { q, classes }, k)
    }

    pub fn coprime(k: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut norm = Vec::with_capacity(pairs.len());
        for (i, j) in pairs {
            ensure!(i != j, Domain, "coprime pair ({i},{j}) repeats an index");
            ensure!(
                (1..=k).contains(&i) && (1..=k).contains(&j),
                Domain,
                "coprime pair ({i},{j}) outside 1..={k}"
            );
            let p = (i.min(j), i.max(j));
            if !norm.contains(&p) {
                norm.push(p);
            }
        }
        norm.sort_unstable();
        Self::with_kind(ModelKind::Coprime { pairs: norm }, k)
    }

    /// Parses `<id>[:params]`.
    ///
    /// `uniform`, `two-squares`, `squarefree`, `nested` take no parameters;
    /// `tau-weights:<theta>;<l1>,...,<lk>`; `residues:<q>`;
    /// `coprime[:i-j,...]`. When `k` is `None` it defaults to 2, or to the
    /// dimension fixed by the parameters.
    pub fn parse(spec: &str, k: Option<usize>) -> Result<Self> {
        let spec = spec.trim();
        let (id, params) = match spec.split_once(':') {
            Some((id, p)) => (id.trim(), Some(p.trim())),
            None => (spec, None),
        };
        let no_params = |m: Result<Self>| -> Result<Self> {
            ensure!(params.is_none(), Domain, "model '{id}' takes no parameters");
            m
        };
        let kk = k.unwrap_or(2);
        let model = match id {
            "uniform" => no_params(Self::uniform(kk))?,
            "two-squares" => no_params(Self::two_squares(kk))?,
            "squarefree" => no_params(Self::squarefree(kk))?,
            "nested" => no_params(Self::nested(kk))?,
            "tau-weights" => {
                let p = params.ok_or_else(|| {
                    Error::Domain("tau-weights needs parameters '<theta>;<l1>,...'".into())
                })?;
                let (theta, lambda) = p.split_once(';').ok_or_else(|| {
                    Error::Domain(format!("cannot parse tau-weights parameters '{p}'"))
                })?;
                Self::tau_weights(parse_rational(theta)?, parse_rational_list(lambda)?)?
            }
            "residues" => {
                let p = params
                    .ok_or_else(|| Error::Domain("residues needs a modulus 'residues:<q>'".into()))?;
                let q: u64 = p
                    .parse()
                    .map_err(|_| Error::Domain(format!("bad residues modulus '{p}'")))?;
                Self::residues(q)?
            }
            "coprime" => {
                let mut pairs = Vec::new();
                for item in params.unwrap_or("").split(',').filter(|s| !s.trim().is_empty()) {
                    let (i, j) = item
                        .split_once('-')
                        .ok_or_else(|| Error::Domain(format!("bad coprime pair '{item}'")))?;
                    let parse = |s: &str| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Domain(format!("bad coprime pair '{item}'")))
                    };
                    pairs.push((parse(i)?, parse(j)?));
                }
                Self::coprime(kk, pairs)?
            }
            other => return Err(Error::Domain(format!("unknown model '{other}'"))),
        };
        if let Some(k) = k {
            ensure!(
                model.k == k,
                Domain,
                "model '{spec}' has dimension {}, but k = {k} was requested",
                model.k
            );
        }
        Ok(model)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Canonical `<id>[:params]` string, accepted by [`WeightModel::parse`].
    pub fn id(&self) -> String {
        match &self.kind {
            ModelKind::Uniform => "uniform".into(),
            ModelKind::TwoSquares => "two-squares".into(),
            ModelKind::Squarefree => "squarefree".into(),
            ModelKind::Nested => "nested".into(),
            ModelKind::TauWeights { theta, lambda } => format!(
                "tau-weights:{};{}",
                fmt_rational(theta),
                lambda.iter().map(fmt_rational).collect::<Vec<_>>().join(",")
            ),
            ModelKind::Residues { q, .. } => format!("residues:{q}"),
            ModelKind::Coprime { pairs } if pairs.is_empty() => "coprime".into(),
            ModelKind::Coprime { pairs } => format!(
                "coprime:{}",
                pairs
                    .iter()
                    .map(|(i, j)| format!("{i}-{j}"))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }

    /// Whether `f` only takes the values 0 and 1.
    pub fn f_is_indicator(&self) -> bool {
        match &self.kind {
            ModelKind::TauWeights { theta, .. } => theta.is_one(),
            _ => true,
        }
    }

    /// Local value `f(p^v)`.
    pub fn f_local<S: Scalar>(&self, p: u64, v: u32) -> S {
        if v == 0 {
            return S::one();
        }
        let flag = match &self.kind {
            ModelKind::Uniform | ModelKind::Coprime { .. } | ModelKind::Nested => true,
            ModelKind::TauWeights { theta, .. } => {
                return rising_binomial(&S::from_rational(theta), v);
            }
            ModelKind::Residues { q, .. } => q % p != 0,
            ModelKind::TwoSquares => p % 4 != 3 || v.is_multiple_of(2),
            ModelKind::Squarefree => v == 1,
        };
        if flag {
            S::one()
        } else {
            S::zero()
        }
    }

    /// `f(n)` as a product of local values.
    pub fn f_value<S: Scalar>(&self, n: &FactoredInteger) -> S {
        n.factors()
            .iter()
            .fold(S::one(), |acc, &(p, v)| acc * self.f_local(p, v))
    }

    /// Local value `G(p^{v_1}, ..., p^{v_k})`.
    pub fn g_local<S: Scalar>(&self, p: u64, comp: &[u32]) -> S {
        debug_assert_eq!(comp.len(), self.k);
        match &self.kind {
            ModelKind::Uniform | ModelKind::TwoSquares | ModelKind::Squarefree => S::one(),
            ModelKind::TauWeights { lambda, .. } => comp
                .iter()
                .zip(lambda)
                .fold(S::one(), |acc, (&v, l)| acc * rising_binomial(&S::from_rational(l), v)),
            ModelKind::Residues { q, classes } => {
                let class = p % q;
                let ok = comp
                    .iter()
                    .zip(classes)
                    .all(|(&v, &a)| v == 0 || a == class);
                if ok {
                    S::one()
                } else {
                    S::zero()
                }
            }
            ModelKind::Coprime { .. } => {
                let support: Vec<usize> = (0..self.k).filter(|&i| comp[i] > 0).collect();
                let ok = support
                    .iter()
                    .enumerate()
                    .all(|(a, &i)| support[a + 1..].iter().all(|&j| self.share[i][j]));
                if ok {
                    S::one()
                } else {
                    S::zero()
                }
            }
            ModelKind::Nested => {
                let mut tail = 0u64;
                let mut acc = S::one();
                for j in (0..self.k).rev() {
                    tail += comp[j] as u64;
                    if j + 1 < self.k {
                        acc = acc / S::from_u64(1 + tail);
                    }
                }
                acc
            }
        }
    }

    /// `sum G(p^{v_1}, ..., p^{v_k})` over compositions of `v`.
    pub fn local_g_sum<S: Scalar>(&self, p: u64, v: u32) -> S {
        assert!(v <= MAX_LOCAL_EXPONENT, "exponent {v} exceeds {MAX_LOCAL_EXPONENT}");
        if v == 0 {
            return S::one();
        }
        match &self.kind {
            ModelKind::Uniform | ModelKind::TwoSquares | ModelKind::Squarefree => {
                let c = binomial_u128(v as u64 + self.k as u64 - 1, self.k as u64 - 1);
                S::from_biguint(&c.into())
            }
            ModelKind::Nested => S::one(),
            ModelKind::TauWeights { lambda, .. } => {
                let total: Rational64 = lambda.iter().copied().sum();
                rising_binomial(&S::from_rational(&total), v)
            }
            _ => compositions(v, self.k)
                .chunks(self.k)
                .fold(S::zero(), |acc, c| acc + self.g_local::<S>(p, c)),
        }
    }

    /// `sum_{n = d_1...d_k} G(d_1, ..., d_k)`.
    pub fn total_g<S: Scalar>(&self, n: &FactoredInteger) -> S {
        n.factors()
            .iter()
            .fold(S::one(), |acc, &(p, v)| acc * self.local_g_sum(p, v))
    }

    /// Residue class of `p` that determines its local data; primes sharing a
    /// key have identical local sums.
    pub fn local_key(&self, p: u64) -> u64 {
        match &self.kind {
            ModelKind::TwoSquares => p % 4,
            ModelKind::Residues { q, .. } => p % q,
            _ => 0,
        }
    }

    /// `F(1, ..., p^v, ..., 1) = f(p^v) G(p^v e_j) / sum G_p(v)` with the
    /// prime power in coordinate `j` (0-based); 0 if the local sum vanishes.
    pub fn coordinate_value(&self, p: u64, v: u32, j: usize) -> f64 {
        let mut comp = vec![0u32; self.k];
        comp[j] = v;
        let sum: f64 = self.local_g_sum(p, v);
        if sum == 0.0 {
            return 0.0;
        }
        self.f_local::<f64>(p, v) * self.g_local::<f64>(p, &comp) / sum
    }

    /// Predicted limit parameters `alpha`.
    pub fn predicted_alpha(&self) -> Vec<f64> {
        let k = self.k as f64;
        match &self.kind {
            ModelKind::Uniform
            | ModelKind::Squarefree
            | ModelKind::Coprime { .. }
            | ModelKind::Residues { .. } => vec![1.0 / k; self.k],
            ModelKind::TwoSquares => vec![1.0 / (2.0 * k); self.k],
            ModelKind::TauWeights { theta, lambda } => {
                let total: Rational64 = lambda.iter().copied().sum();
                lambda
                    .iter()
                    .map(|l| (theta * l / total).to_f64().unwrap_or(f64::NAN))
                    .collect()
            }
            ModelKind::Nested => {
                let mut a: Vec<f64> = (1..self.k).map(|j| 0.5f64.powi(j as i32)).collect();
                a.push(0.5f64.powi(self.k as i32 - 1));
                a
            }
        }
    }

    pub fn predicted_params(&self) -> Result<DirichletParams<f64>> {
        DirichletParams::new(self.predicted_alpha())
    }

    /// Predicted `theta = sum alpha_i`.
    pub fn predicted_theta(&self) -> f64 {
        match &self.kind {
            ModelKind::TwoSquares => 0.5,
            ModelKind::TauWeights { theta, .. } => theta.to_f64().unwrap_or(f64::NAN),
            _ => 1.0,
        }
    }

    pub fn bounds(&self) -> ModelBounds {
        let k = self.k as f64;
        let (beta, delta) = match &self.kind {
            ModelKind::Uniform | ModelKind::Squarefree => (1.0 / k, 0.0),
            ModelKind::TwoSquares => (1.0 / k, 1.0),
            ModelKind::TauWeights { theta, .. } => (theta.to_f64().unwrap_or(f64::NAN), 0.0),
            ModelKind::Residues { .. } => (1.0, 1.0),
            ModelKind::Coprime { .. } | ModelKind::Nested => (1.0, 0.0),
        };
        ModelBounds { beta, c: 1.0, delta }
    }
}

impl fmt::Display for WeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}
