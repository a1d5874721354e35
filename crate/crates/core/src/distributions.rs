//! Input densities with independent marginals.
//!
//! A [`DistributionSpec`] is a list of one-dimensional marginals. It can draw
//! seeded samples, evaluate its density, and return exact expectations of the
//! basis functions used by the surrogate fitters.
//!
//! The textual form is `marginal[^count]` terms joined by `*`, for example
//! `uniform(-3,3)^10`, `gauss(0,2)^10` or `beta(2,5)*beta(1,3)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta as BetaSampler, Distribution, Normal};
use statrs::function::beta::ln_beta;

use crate::error::{Result, StackMcError};
use crate::rng;

/// Highest monomial order with a closed-form expectation unless overridden.
pub const DEFAULT_MAX_MONOMIAL_ORDER: u32 = 8;

/// One-dimensional marginal density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mu: f64, sigma: f64 },
    /// Beta(a, b) on `[0, 1]`.
    Beta { a: f64, b: f64 },
}

/// A one-dimensional basis function of the additive surrogates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `x^n`
    Monomial(u32),
    /// `cos(k x)`
    Cos(u32),
    /// `sin(k x)`
    Sin(u32),
}

impl Basis {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Basis::Monomial(n) => x.powi(n as i32),
            Basis::Cos(k) => (k as f64 * x).cos(),
            Basis::Sin(k) => (k as f64 * x).sin(),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Monomial(n) => write!(f, "x^{n}"),
            Basis::Cos(k) => write!(f, "cos({k}x)"),
            Basis::Sin(k) => write!(f, "sin({k}x)"),
        }
    }
}

impl Marginal {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Marginal::Uniform { lo, hi }.validated()
    }

    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        Marginal::Gaussian { mu, sigma }.validated()
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        Marginal::Beta { a, b }.validated()
    }

    fn validated(self) -> Result<Self> {
        let ok = match self {
            Marginal::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Marginal::Gaussian { mu, sigma } => mu.is_finite() && sigma.is_finite() && sigma > 0.0,
            Marginal::Beta { a, b } => a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(StackMcError::Parameter(format!("invalid marginal {self}")))
        }
    }

    /// Closed support interval (infinite ends for the Gaussian).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Marginal::Uniform { lo, hi } => (lo, hi),
            Marginal::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Marginal::Beta { .. } => (0.0, 1.0),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x >= lo && x <= hi
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        match *self {
            Marginal::Uniform { lo, hi } => 1.0 / (hi - lo),
            Marginal::Gaussian { mu, sigma } => {
                let z = (x - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            Marginal::Beta { a, b } => {
                x.powf(a - 1.0) * (1.0 - x).powf(b - 1.0) * (-ln_beta(a, b)).exp()
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Marginal::Uniform { lo, hi } => {
                let u: f64 = rng.random();
                (lo + (hi - lo) * u).min(hi)
            }
            Marginal::Gaussian { mu, sigma } => Normal::new(mu, sigma).expect("validated").sample(rng),
            Marginal::Beta { a, b } => BetaSampler::new(a, b).expect("validated").sample(rng),
        }
    }

    /// Exact `E[basis(x)]` using [`DEFAULT_MAX_MONOMIAL_ORDER`].
    pub fn basis_expectation(&self, basis: Basis) -> Result<f64> {
        basis_expectation(self, basis, DEFAULT_MAX_MONOMIAL_ORDER)
    }
}

impl fmt::Display for Marginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marginal::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            Marginal::Gaussian { mu, sigma } => write!(f, "gauss({mu},{sigma})"),
            Marginal::Beta { a, b } => write!(f, "beta({a},{b})"),
        }
    }
}

/// `∏_{i=1}^{n} (a+i-1) / ∏_{i=1}^{n} (a+b+i-1)`, the n-th raw moment of Beta(a, b).
pub fn beta_raw_moment(a: f64, b: f64, n: u32) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(StackMcError::Parameter(format!("beta shape parameters must be positive, got ({a}, {b})")));
    }
    Ok((1..=n).fold(1.0, |acc, i| {
        let i = i as f64;
        acc * (a + i - 1.0) / (a + b + i - 1.0)
    }))
}

fn gaussian_raw_moment(mu: f64, sigma: f64, n: u32) -> f64 {
    // Central moments m_j = (j-1) σ² m_{j-2}, m_0 = 1, m_odd = 0.
    let mut central = vec![0.0; n as usize + 1];
    central[0] = 1.0;
    for j in (2..=n as usize).step_by(2) {
        central[j] = (j as f64 - 1.0) * sigma * sigma * central[j - 2];
    }
    let mut binom = 1.0;
    let mut total = 0.0;
    for j in 0..=n {
        total += binom * mu.powi((n - j) as i32) * central[j as usize];
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    total
}

/// Exact expectation of `basis` under `marginal`.
///
/// Supported pairs: monomials up to `max_order` for every marginal, and
/// `cos(kx)`/`sin(kx)` for uniform marginals. Anything else returns
/// [`StackMcError::UnsupportedIntegral`].
pub fn basis_expectation(marginal: &Marginal, basis: Basis, max_order: u32) -> Result<f64> {
    let unsupported = || StackMcError::UnsupportedIntegral {
        marginal: marginal.to_string(),
        basis: basis.to_string(),
    };
    match (*marginal, basis) {
        (_, Basis::Monomial(n)) if n > max_order => Err(unsupported()),
        (Marginal::Uniform { lo, hi }, Basis::Monomial(n)) => {
            // (hi^{n+1} - lo^{n+1}) / ((n+1)(hi-lo)) without the cancelling division.
            let sum: f64 = (0..=n).map(|j| lo.powi(j as i32) * hi.powi((n - j) as i32)).sum();
            Ok(sum / (n + 1) as f64)
        }
        (Marginal::Uniform { lo, hi }, Basis::Cos(k)) => Ok(if k == 0 {
            1.0
        } else {
            let k = k as f64;
            ((k * hi).sin() - (k * lo).sin()) / (k * (hi - lo))
        }),
        (Marginal::Uniform { lo, hi }, Basis::Sin(k)) => Ok(if k == 0 {
            0.0
        } else {
            let k = k as f64;
            ((k * lo).cos() - (k * hi).cos()) / (k * (hi - lo))
        }),
        (Marginal::Gaussian { mu, sigma }, Basis::Monomial(n)) => Ok(gaussian_raw_moment(mu, sigma, n)),
        (Marginal::Beta { a, b }, Basis::Monomial(n)) => beta_raw_moment(a, b, n),
        _ => Err(unsupported()),
    }
}

/// Product density over independent marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    marginals: Vec<Marginal>,
}

impl DistributionSpec {
    pub fn new(marginals: Vec<Marginal>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(StackMcError::Parameter("distribution needs at least one dimension".into()));
        }
        let marginals = marginals.into_iter().map(Marginal::validated).collect::<Result<_>>()?;
        Ok(DistributionSpec { marginals })
    }

    /// The same marginal repeated `dims` times.
    pub fn iid(marginal: Marginal, dims: usize) -> Result<Self> {
        Self::new(vec![marginal; dims])
    }

    pub fn dims(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    pub fn marginal(&self, d: usize) -> &Marginal {
        &self.marginals[d]
    }

    pub fn pdf(&self, point: &[f64]) -> Result<f64> {
        check_dims(self.dims(), point.len())?;
        Ok(self.marginals.iter().zip(point).map(|(m, &x)| m.pdf(x)).product())
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dims() && self.marginals.iter().zip(point).all(|(m, &x)| m.contains(x))
    }

    /// Draws `n` i.i.d. points, row by row, from a stream keyed by `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleMatrix> {
        if n == 0 {
            return Err(StackMcError::Parameter("sample count must be at least 1".into()));
        }
        let mut rng = rng::stream(seed);
        Ok(self.sample_with(n, &mut rng).with_seed(seed))
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> SampleMatrix {
        let d = self.dims();
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n {
            data.extend(self.marginals.iter().map(|m| m.draw(rng)));
        }
        SampleMatrix { dims: d, data, seed: None }
    }
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(StackMcError::Shape { expected, got })
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.marginals.len() {
            let m = &self.marginals[i];
            let run = self.marginals[i..].iter().take_while(|x| *x == m).count();
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{m}")?;
            if run > 1 {
                write!(f, "^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

impl FromStr for DistributionSpec {
    type Err = StackMcError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| StackMcError::Parameter(format!("cannot parse distribution {s:?}: {msg}"));
        let mut marginals = Vec::new();
        for term in s.split('*') {
            let term = term.trim();
            let (head, count) = match term.rsplit_once('^') {
                Some((head, count)) => {
                    let count: usize = count.trim().parse().map_err(|_| bad(format!("bad repeat count in {term:?}")))?;
                    if count == 0 {
                        return Err(bad("repeat count must be positive".into()));
                    }
                    (head.trim(), count)
                }
                None => (term, 1),
            };
            let open = head.find('(').ok_or_else(|| bad(format!("missing '(' in {head:?}")))?;
            if !head.ends_with(')') {
                return Err(bad(format!("missing ')' in {head:?}")));
            }
            let name = head[..open].trim();
            let args = head[open + 1..head.len() - 1]
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad(format!("bad number {a:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            if args.len() != 2 {
                return Err(bad(format!("{name} takes two parameters")));
            }
            let m = match name {
                "uniform" => Marginal::uniform(args[0], args[1]),
                "gauss" | "gaussian" | "normal" => Marginal::gaussian(args[0], args[1]),
                "beta" => Marginal::beta(args[0], args[1]),
                other => return Err(bad(format!("unknown marginal {other:?}"))),
            }?;
            marginals.extend(std::iter::repeat_n(m, count));
        }
        DistributionSpec::new(marginals)
    }
}

/// N × D matrix of sample points stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    dims: usize,
    data: Vec<f64>,
    seed: Option<u64>,
}

impl SampleMatrix {
    pub fn from_rows(dims: usize, data: Vec<f64>) -> Result<Self> {
        if dims == 0 || !data.len().is_multiple_of(dims) {
            return Err(StackMcError::Shape { expected: dims.max(1), got: data.len() });
        }
        Ok(SampleMatrix { dims, data, seed: None })
    }

    /// Column vector of one-dimensional points.
    pub fn from_column(xs: &[f64]) -> Self {
        SampleMatrix { dims: 1, data: xs.to_vec(), seed: None }
    }

    fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dims)
    }

    /// New matrix holding the given rows in the given order.
    pub fn select(&self, indices: &[usize]) -> SampleMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.dims);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        SampleMatrix { dims: self.dims, data, seed: None }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}
