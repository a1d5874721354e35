//! Additive linear-basis surrogates.
//!
//! Every surrogate has the form `g(x) = β₀ + Σ_d Σ_m β_{m,d} φ_m(x_d)`. The
//! coefficient layout is fixed: the constant term first, then one block per
//! input dimension. Inside a block, polynomial terms are `x, x², …` and
//! Fourier terms are `cos(x), …, cos(hx), sin(x), …, sin(hx)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::distributions::{check_dims, Basis, DistributionSpec, SampleMatrix, DEFAULT_MAX_MONOMIAL_ORDER};
use crate::error::{Result, StackMcError};
use crate::{rng, stats};

/// Relative singular-value cutoff of the least-squares solve.
pub const SINGULAR_VALUE_CUTOFF: f64 = 1e-12;

/// Smallest number of Monte Carlo draws used for a surrogate expectation.
pub const MIN_MC_EXPECTATION_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitterFamily {
    Polynomial { order: u32 },
    Fourier { harmonics: u32 },
}

impl FitterFamily {
    /// Per-dimension basis functions in coefficient order.
    pub fn block(&self) -> Vec<Basis> {
        match *self {
            FitterFamily::Polynomial { order } => (1..=order).map(Basis::Monomial).collect(),
            FitterFamily::Fourier { harmonics } => (1..=harmonics)
                .map(Basis::Cos)
                .chain((1..=harmonics).map(Basis::Sin))
                .collect(),
        }
    }

    pub fn block_len(&self) -> usize {
        match *self {
            FitterFamily::Polynomial { order } => order as usize,
            FitterFamily::Fourier { harmonics } => 2 * harmonics as usize,
        }
    }
}

impl fmt::Display for FitterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitterFamily::Polynomial { order } => write!(f, "poly({order})"),
            FitterFamily::Fourier { harmonics } => write!(f, "fourier({harmonics})"),
        }
    }
}

impl FromStr for FitterFamily {
    type Err = StackMcError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || StackMcError::Parameter(format!("cannot parse fitter {s:?}; expected poly(n) or fourier(n)"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let n: u32 = inner.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        match s[..open].trim() {
            "poly" | "polynomial" => Ok(FitterFamily::Polynomial { order: n }),
            "fourier" => Ok(FitterFamily::Fourier { harmonics: n }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitterSpec {
    pub dims: usize,
    pub family: FitterFamily,
    /// Ridge penalty on the non-constant coefficients; 0 disables it.
    pub ridge: f64,
}

impl FitterSpec {
    pub fn new(family: FitterFamily, dims: usize) -> Result<Self> {
        if dims == 0 {
            return Err(StackMcError::Parameter("fitter needs at least one dimension".into()));
        }
        Ok(FitterSpec { dims, family, ridge: 0.0 })
    }

    pub fn polynomial(order: u32, dims: usize) -> Result<Self> {
        Self::new(FitterFamily::Polynomial { order }, dims)
    }

    pub fn fourier(harmonics: u32, dims: usize) -> Result<Self> {
        Self::new(FitterFamily::Fourier { harmonics }, dims)
    }

    pub fn with_ridge(mut self, ridge: f64) -> Result<Self> {
        if !(ridge >= 0.0 && ridge.is_finite()) {
            return Err(StackMcError::Parameter(format!("ridge must be non-negative, got {ridge}")));
        }
        self.ridge = ridge;
        Ok(self)
    }

    /// Number of coefficients `P`.
    pub fn n_params(&self) -> usize {
        1 + self.dims * self.family.block_len()
    }

    pub fn feature_row(&self, point: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.dims, point.len())?;
        let mut row = Vec::with_capacity(self.n_params());
        self.write_features(point, &mut row);
        Ok(row)
    }

    fn write_features(&self, point: &[f64], out: &mut Vec<f64>) {
        out.push(1.0);
        for &x in point {
            match self.family {
                FitterFamily::Polynomial { order } => {
                    let mut p = 1.0;
                    for _ in 0..order {
                        p *= x;
                        out.push(p);
                    }
                }
                FitterFamily::Fourier { harmonics } => {
                    out.extend((1..=harmonics).map(|k| (k as f64 * x).cos()));
                    out.extend((1..=harmonics).map(|k| (k as f64 * x).sin()));
                }
            }
        }
    }

    fn design(&self, points: &SampleMatrix) -> DMatrix<f64> {
        let p = self.n_params();
        let mut buf = Vec::with_capacity(points.len() * p);
        for row in points.rows() {
            self.write_features(row, &mut buf);
        }
        DMatrix::from_row_slice(points.len(), p, &buf)
    }

    /// Least-squares fit of the surrogate to `values` at `points`.
    ///
    /// Requires at least `P` points. Rank-deficient designs get the
    /// minimum-norm solution, with singular values below
    /// `SINGULAR_VALUE_CUTOFF * σ_max` treated as zero.
    pub fn fit(&self, points: &SampleMatrix, values: &[f64]) -> Result<FitModel> {
        check_dims(self.dims, points.dims())?;
        check_dims(points.len(), values.len())?;
        let p = self.n_params();
        if points.len() < p {
            return Err(StackMcError::InsufficientData { needed: p, have: points.len() });
        }
        let mut a = self.design(points);
        // Centred responses keep large offsets out of the solve; the mean
        // goes back into the unpenalised intercept.
        let offset = stats::mean(values);
        let mut y = DVector::from_iterator(values.len(), values.iter().map(|v| v - offset));
        if self.ridge > 0.0 {
            let n = a.nrows();
            a = a.insert_rows(n, p - 1, 0.0);
            y = y.insert_rows(n, p - 1, 0.0);
            let s = self.ridge.sqrt();
            for j in 1..p {
                a[(n + j - 1, j)] = s;
            }
        }
        let mut beta: Vec<f64> = solve_min_norm(a, y).iter().copied().collect();
        beta[0] += offset;
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(StackMcError::Numeric { fold: 0, what: "non-finite fit coefficients".into() });
        }
        Ok(FitModel { spec: *self, beta })
    }
}

fn solve_min_norm(a: DMatrix<f64>, y: DVector<f64>) -> DVector<f64> {
    // Tall systems are first reduced by QR; the SVD of R has the same
    // singular values and the same minimum-norm solution.
    let (a, y) = if a.nrows() > 2 * a.ncols() {
        let qr = a.qr();
        let qty = qr.q().tr_mul(&y);
        (qr.r(), qty)
    } else {
        (a, y)
    };
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (SINGULAR_VALUE_CUTOFF * smax).max(f64::MIN_POSITIVE);
    svd.solve(&y, eps).expect("u and v were computed")
}

/// A fitted surrogate.
#[derive(Debug, Clone, PartialEq)]
pub struct FitModel {
    pub spec: FitterSpec,
    pub beta: Vec<f64>,
}

impl FitModel {
    pub fn new(spec: FitterSpec, beta: Vec<f64>) -> Result<Self> {
        check_dims(spec.n_params(), beta.len())?;
        Ok(FitModel { spec, beta })
    }

    /// Model `g(x) = c`.
    pub fn constant(spec: FitterSpec, c: f64) -> Self {
        let mut beta = vec![0.0; spec.n_params()];
        beta[0] = c;
        FitModel { spec, beta }
    }

    pub fn predict(&self, point: &[f64]) -> Result<f64> {
        check_dims(self.spec.dims, point.len())?;
        Ok(self.predict_unchecked(point))
    }

    pub(crate) fn predict_unchecked(&self, point: &[f64]) -> f64 {
        let mut beta = self.beta.iter();
        let mut total = *beta.next().unwrap();
        for &x in point {
            match self.spec.family {
                FitterFamily::Polynomial { order } => {
                    let mut p = 1.0;
                    for _ in 0..order {
                        p *= x;
                        total += beta.next().unwrap() * p;
                    }
                }
                FitterFamily::Fourier { harmonics } => {
                    for k in 1..=harmonics {
                        total += beta.next().unwrap() * (k as f64 * x).cos();
                    }
                    for k in 1..=harmonics {
                        total += beta.next().unwrap() * (k as f64 * x).sin();
                    }
                }
            }
        }
        total
    }

    pub fn predict_all(&self, points: &SampleMatrix) -> Result<Vec<f64>> {
        check_dims(self.spec.dims, points.dims())?;
        Ok(points.rows().map(|r| self.predict_unchecked(r)).collect())
    }

    /// Exact `∫ g(x) p(x) dx`, term by term.
    pub fn analytic_expectation(&self, dist: &DistributionSpec) -> Result<f64> {
        self.analytic_expectation_up_to(dist, DEFAULT_MAX_MONOMIAL_ORDER)
    }

    pub fn analytic_expectation_up_to(&self, dist: &DistributionSpec, max_order: u32) -> Result<f64> {
        check_dims(self.spec.dims, dist.dims())?;
        let block = self.spec.family.block();
        let mut total = self.beta[0];
        for (d, coeffs) in self.beta[1..].chunks_exact(block.len()).enumerate() {
            let marginal = dist.marginal(d);
            for (&b, &basis) in coeffs.iter().zip(&block) {
                total += b * crate::distributions::basis_expectation(marginal, basis, max_order)?;
            }
        }
        Ok(total)
    }

    /// Mean prediction over `n_g` fresh draws from `dist`.
    pub fn mc_expectation(&self, dist: &DistributionSpec, n_g: usize, seed: u64) -> Result<f64> {
        check_dims(self.spec.dims, dist.dims())?;
        if n_g == 0 {
            return Err(StackMcError::Parameter("n_g must be at least 1".into()));
        }
        let mut rng = rng::stream(seed);
        let points = dist.sample_with(n_g, &mut rng);
        let preds: Vec<f64> = points.rows().map(|r| self.predict_unchecked(r)).collect();
        Ok(stats::mean(&preds))
    }
}

/// Default Monte Carlo sample count for a surrogate expectation given `n` data points.
pub fn default_mc_samples(n: usize) -> usize {
    MIN_MC_EXPECTATION_SAMPLES.max(100 * n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_rows() {
        let p3 = FitterSpec::polynomial(3, 1).unwrap();
        assert_eq!(p3.feature_row(&[2.0]).unwrap(), vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(p3.feature_row(&[0.0]).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let f3 = FitterSpec::fourier(3, 1).unwrap();
        assert_eq!(f3.feature_row(&[0.0]).unwrap(), vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let p2 = FitterSpec::polynomial(2, 2).unwrap();
        assert_eq!(p2.feature_row(&[2.0, 3.0]).unwrap(), vec![1.0, 2.0, 4.0, 3.0, 9.0]);
        assert!(matches!(p2.feature_row(&[1.0]), Err(StackMcError::Shape { expected: 2, got: 1 })));
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(FitterSpec::polynomial(3, 10).unwrap().n_params(), 31);
        assert_eq!(FitterSpec::fourier(3, 20).unwrap().n_params(), 121);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("poly(3)".parse::<FitterFamily>().unwrap(), FitterFamily::Polynomial { order: 3 });
        assert_eq!(" fourier( 3 ) ".parse::<FitterFamily>().unwrap().to_string(), "fourier(3)");
        assert!("poly(0)".parse::<FitterFamily>().is_err());
        assert!("spline(3)".parse::<FitterFamily>().is_err());
        assert!("poly3".parse::<FitterFamily>().is_err());
    }

    #[test]
    fn too_few_points() {
        let spec = FitterSpec::polynomial(3, 1).unwrap();
        let pts = SampleMatrix::from_column(&[0.0, 1.0, 2.0]);
        assert!(matches!(
            spec.fit(&pts, &[1.0, 2.0, 3.0]),
            Err(StackMcError::InsufficientData { needed: 4, have: 3 })
        ));
    }

    #[test]
    fn recovers_in_family_coefficients() {
        let dist: DistributionSpec = "uniform(-3,3)^3".parse().unwrap();
        for family in [FitterFamily::Polynomial { order: 3 }, FitterFamily::Fourier { harmonics: 2 }] {
            let spec = FitterSpec::new(family, 3).unwrap();
            let truth: Vec<f64> = (0..spec.n_params()).map(|i| (i as f64 * 0.37).sin() * 2.0).collect();
            let model = FitModel::new(spec, truth.clone()).unwrap();
            let pts = dist.sample(40, 1).unwrap();
            let vals = model.predict_all(&pts).unwrap();
            let fitted = spec.fit(&pts, &vals).unwrap();
            for (a, b) in fitted.beta.iter().zip(&truth) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
            let back = fitted.predict_all(&pts).unwrap();
            for (a, b) in back.iter().zip(&vals) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rank_deficient_gives_min_norm() {
        let spec = FitterSpec::polynomial(2, 1).unwrap();
        let pts = SampleMatrix::from_column(&[0.0, 1.0, 0.0, 1.0]);
        let fitted = spec.fit(&pts, &[1.0, 3.0, 1.0, 3.0]).unwrap();
        // x == x² on {0,1}; minimum-norm split puts 1 on each.
        assert!((fitted.beta[0] - 1.0).abs() < 1e-12);
        assert!((fitted.beta[1] - 1.0).abs() < 1e-12);
        assert!((fitted.beta[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residuals_orthogonal_to_design() {
        let dist: DistributionSpec = "gauss(0,2)^2".parse().unwrap();
        let spec = FitterSpec::polynomial(3, 2).unwrap();
        let pts = dist.sample(60, 3).unwrap();
        let vals: Vec<f64> = pts.rows().map(|r| (r[0] * r[1]).sin() + r[0].powi(4)).collect();
        let model = spec.fit(&pts, &vals).unwrap();
        let resid: Vec<f64> = pts.rows().zip(&vals).map(|(r, v)| v - model.predict(r).unwrap()).collect();
        let design = spec.design(&pts);
        for j in 0..spec.n_params() {
            let col = design.column(j);
            let dot: f64 = col.iter().zip(&resid).map(|(a, b)| a * b).sum();
            let scale = col.norm() * resid.iter().map(|r| r * r).sum::<f64>().sqrt();
            assert!(dot.abs() < 1e-8 * scale, "column {j}: {dot}");
        }
    }

    #[test]
    fn ridge_shrinks_coefficients() {
        let dist: DistributionSpec = "uniform(-1,1)".parse().unwrap();
        let pts = dist.sample(30, 2).unwrap();
        let vals: Vec<f64> = pts.rows().map(|r| 5.0 * r[0]).collect();
        let plain = FitterSpec::polynomial(1, 1).unwrap();
        let ridged = plain.with_ridge(10.0).unwrap();
        let b0 = plain.fit(&pts, &vals).unwrap().beta[1];
        let b1 = ridged.fit(&pts, &vals).unwrap().beta[1];
        assert!((b0 - 5.0).abs() < 1e-10);
        assert!(b1.abs() < b0.abs());
        assert!(plain.with_ridge(-1.0).is_err());
    }

    #[test]
    fn constant_model() {
        let spec = FitterSpec::fourier(3, 2).unwrap();
        let m = FitModel::constant(spec, 2.5);
        let dist: DistributionSpec = "uniform(-3,3)^2".parse().unwrap();
        assert_eq!(m.predict(&[0.3, -1.1]).unwrap(), 2.5);
        assert_eq!(m.analytic_expectation(&dist).unwrap(), 2.5);
        assert_eq!(m.mc_expectation(&dist, 1000, 4).unwrap(), 2.5);
        let beta: DistributionSpec = "beta(2,2)^2".parse().unwrap();
        // Fourier terms have no closed form under a beta marginal.
        assert!(matches!(m.analytic_expectation(&beta), Err(StackMcError::UnsupportedIntegral { .. })));
    }

    #[test]
    fn mc_expectation_of_square() {
        let spec = FitterSpec::polynomial(2, 1).unwrap();
        let m = FitModel::new(spec, vec![0.0, 0.0, 1.0]).unwrap();
        let dist: DistributionSpec = "uniform(-1,1)".parse().unwrap();
        let n = 1_000_000;
        let est = m.mc_expectation(&dist, n, 17).unwrap();
        // Var[x²] = 1/5 - 1/9 under U(-1,1).
        let se = ((1.0 / 5.0 - 1.0 / 9.0) / n as f64).sqrt();
        assert!((est - 1.0 / 3.0).abs() < 4.0 * se);
    }
}
