//! Integral estimators: plain Monte Carlo, importance sampling, the fit-all
//! baseline and stacked Monte Carlo.
//!
//! Stacked Monte Carlo fits one surrogate per cross-validation fold, uses the
//! held-out predictions to set the control-variate weight `α = ρ σ_f / σ_g`,
//! and corrects each fold's surrogate integral with the held-out residuals
//! `f - α g_i`. The fold estimates are averaged. When any fold's surrogate
//! integral is more than `C` standard errors away from the plain Monte Carlo
//! mean, the plain mean is returned instead.

use rand::seq::SliceRandom;

use crate::distributions::{check_dims, DistributionSpec, SampleMatrix};
use crate::error::{Result, StackMcError};
use crate::fitters::{default_mc_samples, FitModel, FitterSpec};
use crate::rng::{self, Purpose};
use crate::stats;

/// Default number of folds.
pub const DEFAULT_FOLDS: usize = 10;
/// Default guard threshold `C`.
pub const DEFAULT_GUARD: f64 = 5.0;

/// Sample points with their function values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: SampleMatrix,
    pub values: Vec<f64>,
}

impl Dataset {
    pub fn new(points: SampleMatrix, values: Vec<f64>) -> Result<Self> {
        check_dims(points.len(), values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(StackMcError::Parameter(format!("value {i} is not finite")));
        }
        Ok(Dataset { points, values })
    }

    /// Samples `n` points from `dist` and evaluates `f` on them.
    pub fn generate<F: Fn(&[f64]) -> f64>(dist: &DistributionSpec, n: usize, seed: u64, f: F) -> Result<Self> {
        let points = dist.sample(n, seed)?;
        let values = points.rows().map(f).collect();
        Dataset::new(points, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.points.dims()
    }

    /// Same points with values mapped through `f`.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Dataset::new(self.points.clone(), self.values.iter().map(|&v| f(v)).collect())
    }
}

/// Plain Monte Carlo summary of a set of values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub sigma: f64,
    /// Error in the mean, `σ / √N`.
    pub eim: f64,
}

pub fn mc_estimate(values: &[f64]) -> Result<McEstimate> {
    if values.len() < 2 {
        return Err(StackMcError::InsufficientData { needed: 2, have: values.len() });
    }
    let mean = stats::mean(values);
    let sigma = stats::variance_about(values, mean).sqrt();
    Ok(McEstimate { mean, sigma, eim: sigma / (values.len() as f64).sqrt() })
}

/// Importance weights `p(x)/q(x)` at every sample point.
pub fn importance_weights(points: &SampleMatrix, p: &DistributionSpec, q: &DistributionSpec) -> Result<Vec<f64>> {
    check_dims(p.dims(), points.dims())?;
    check_dims(q.dims(), points.dims())?;
    points
        .rows()
        .enumerate()
        .map(|(i, x)| {
            let qx = q.pdf(x)?;
            if qx > 0.0 {
                Ok(p.pdf(x)? / qx)
            } else {
                Err(StackMcError::DegenerateWeight { index: i })
            }
        })
        .collect()
}

/// `(1/N) Σ f(x_i) p(x_i) / q(x_i)` for samples drawn from `q`.
pub fn is_estimate(dataset: &Dataset, p: &DistributionSpec, q: &DistributionSpec) -> Result<f64> {
    let weighted = weighted_values(dataset, p, q)?;
    if weighted.is_empty() {
        return Err(StackMcError::InsufficientData { needed: 1, have: 0 });
    }
    Ok(stats::mean(&weighted))
}

fn weighted_values(dataset: &Dataset, p: &DistributionSpec, q: &DistributionSpec) -> Result<Vec<f64>> {
    let w = importance_weights(&dataset.points, p, q)?;
    Ok(dataset.values.iter().zip(&w).map(|(f, w)| f * w).collect())
}

/// Expectation of one surrogate fitted to all samples.
pub fn fit_all_estimate(dataset: &Dataset, spec: &FitterSpec, dist: &DistributionSpec) -> Result<f64> {
    spec.fit(&dataset.points, &dataset.values)?.analytic_expectation(dist)
}

/// Disjoint test sets covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPartition {
    test_indices: Vec<Vec<usize>>,
}

impl FoldPartition {
    /// Validates an explicit assignment: `k ≥ 2` non-empty disjoint sets covering `0..n`.
    pub fn from_sets(n: usize, test_indices: Vec<Vec<usize>>) -> Result<Self> {
        if test_indices.len() < 2 {
            return Err(StackMcError::Parameter("need at least two folds".into()));
        }
        let mut seen = vec![false; n];
        for set in &test_indices {
            if set.is_empty() {
                return Err(StackMcError::Parameter("empty fold".into()));
            }
            for &i in set {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(StackMcError::Parameter(format!("index {i} out of range or repeated")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(StackMcError::Parameter("folds do not cover every sample".into()));
        }
        Ok(FoldPartition { test_indices })
    }

    /// Folds from a per-sample label in `0..k`.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut sets = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            sets[l].push(i);
        }
        Self::from_sets(labels.len(), sets)
    }

    pub fn k(&self) -> usize {
        self.test_indices.len()
    }

    pub fn n(&self) -> usize {
        self.test_indices.iter().map(Vec::len).sum()
    }

    pub fn test(&self, fold: usize) -> &[usize] {
        &self.test_indices[fold]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.test_indices
    }

    /// Indices not in `fold`'s test set, ascending.
    pub fn train(&self, fold: usize) -> Vec<usize> {
        let mut in_test = vec![false; self.n()];
        for &i in self.test(fold) {
            in_test[i] = true;
        }
        (0..self.n()).filter(|&i| !in_test[i]).collect()
    }

    /// Fold label of every sample.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n()];
        for (f, set) in self.test_indices.iter().enumerate() {
            for &i in set {
                labels[i] = f;
            }
        }
        labels
    }
}

/// Random partition of `0..n` into `k` test sets.
///
/// The first `n mod k` folds get `⌈n/k⌉` samples, the rest `⌊n/k⌋`.
pub fn partition_folds(n: usize, k: usize, seed: u64) -> Result<FoldPartition> {
    if k < 2 || k > n {
        return Err(StackMcError::Parameter(format!("need 2 <= k <= n, got k={k}, n={n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed));
    let (base, extra) = (n / k, n % k);
    let mut sets = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        sets.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(FoldPartition { test_indices: sets })
}

/// Statistics of held-out predictions against truths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaStats {
    pub mu_f: f64,
    pub mu_g: f64,
    pub sigma_f: f64,
    pub sigma_g: f64,
    pub cov_fg: f64,
    pub rho: f64,
    pub alpha: f64,
    /// Set when `σ_f = 0`: the function is constant on the samples.
    pub constant_values: bool,
}

/// Control-variate weight from one held-out prediction per sample.
pub fn compute_alpha(heldout_pred: &[f64], truths: &[f64]) -> Result<AlphaStats> {
    check_dims(truths.len(), heldout_pred.len())?;
    if truths.len() < 2 {
        return Err(StackMcError::InsufficientData { needed: 2, have: truths.len() });
    }
    let mu_f = stats::mean(truths);
    let mu_g = stats::mean(heldout_pred);
    let sigma_f = stats::variance_about(truths, mu_f).sqrt();
    let sigma_g = stats::variance_about(heldout_pred, mu_g).sqrt();
    let cov_fg = stats::covariance_about(truths, heldout_pred, mu_f, mu_g);
    let (rho, alpha) = if sigma_g > 0.0 && sigma_f > 0.0 {
        let rho = cov_fg / (sigma_f * sigma_g);
        (rho, rho * sigma_f / sigma_g)
    } else {
        (0.0, 0.0)
    };
    Ok(AlphaStats { mu_f, mu_g, sigma_f, sigma_g, cov_fg, rho, alpha, constant_values: sigma_f == 0.0 })
}

/// Fold likelihoods `L_i = |ĝ_i - f̂_mc| / σ̄` and whether `max L_i > C`.
///
/// With `σ̄ = 0` the guard fires iff some `ĝ_i` differs from `f̂_mc`; the
/// reported likelihoods are then 0 or `+∞`.
pub fn eim_guard(g_hats: &[f64], f_hat_mc: f64, eim: f64, c_guard: f64) -> (bool, Vec<f64>) {
    let likelihoods: Vec<f64> = g_hats
        .iter()
        .map(|&g| {
            let gap = (g - f_hat_mc).abs();
            if eim > 0.0 {
                gap / eim
            } else if gap == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let triggered = likelihoods.iter().any(|&l| l > c_guard);
    (triggered, likelihoods)
}

/// How each fold's surrogate integral `ĝ_i` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GHatMethod {
    /// Closed form; unsupported basis/density pairs are an error.
    Analytic,
    /// Monte Carlo over `n_g` draws, or `max(10⁵, 100 N)` when `None`.
    MonteCarlo { n_g: Option<usize> },
    /// Closed form, falling back to Monte Carlo when unavailable.
    #[default]
    Auto,
}

/// Knobs of one stacked Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct StackConfig {
    pub k: usize,
    pub c_guard: f64,
    pub seed: u64,
    /// Fixed fold assignment; bypasses random partitioning.
    pub partition: Option<FoldPartition>,
    /// Fixed `α`; bypasses the held-out estimate.
    pub alpha_override: Option<f64>,
    pub g_hat: GHatMethod,
    /// Shifts every `ĝ_i` by this many `σ_f`. Diagnostic for the guard; 0 in normal use.
    pub g_hat_offset_sigmas: f64,
}

impl Default for StackConfig {
    fn default() -> Self {
        StackConfig {
            k: DEFAULT_FOLDS,
            c_guard: DEFAULT_GUARD,
            seed: 0,
            partition: None,
            alpha_override: None,
            g_hat: GHatMethod::Auto,
            g_hat_offset_sigmas: 0.0,
        }
    }
}

impl StackConfig {
    pub fn new(k: usize, c_guard: f64, seed: u64) -> Self {
        StackConfig { k, c_guard, seed, ..Default::default() }
    }

    pub fn with_partition(mut self, partition: FoldPartition) -> Self {
        self.k = partition.k();
        self.partition = Some(partition);
        self
    }
}

/// Per-fold quantities of a stacked run.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldEstimate {
    pub beta: Vec<f64>,
    pub test_size: usize,
    pub g_hat: f64,
    /// Mean of `f - α g_i` over the fold's held-out points.
    pub correction: f64,
    /// `α ĝ_i + correction`.
    pub corrected: f64,
    pub likelihood: f64,
}

/// Everything a stacked Monte Carlo run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct StackReport {
    pub f_hat_mc: f64,
    pub f_hat_fit: f64,
    pub f_hat_smc: f64,
    pub alpha_stats: AlphaStats,
    pub per_fold: Vec<FoldEstimate>,
    pub eim: f64,
    pub guard_triggered: bool,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
}

impl StackReport {
    pub const CSV_HEADER: [&'static str; 14] = [
        "n", "k", "seed", "f_hat_mc", "f_hat_fit", "f_hat_smc", "alpha", "rho", "mu_f", "mu_g", "sigma_f",
        "sigma_g", "eim", "guard_triggered",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        let a = &self.alpha_stats;
        let mut rec = vec![self.n.to_string(), self.k.to_string(), self.seed.to_string()];
        rec.extend(
            [self.f_hat_mc, self.f_hat_fit, self.f_hat_smc, a.alpha, a.rho, a.mu_f, a.mu_g, a.sigma_f, a.sigma_g, self.eim]
                .iter()
                .map(|v| fmt_real(*v)),
        );
        rec.push(self.guard_triggered.to_string());
        rec
    }

    /// Flat `key = value` listing, per-fold entries suffixed with the fold number.
    pub fn to_kv_block(&self) -> String {
        let a = &self.alpha_stats;
        let mut lines = vec![
            format!("n = {}", self.n),
            format!("k = {}", self.k),
            format!("seed = {}", self.seed),
            format!("f_hat_mc = {}", fmt_real(self.f_hat_mc)),
            format!("f_hat_fit = {}", fmt_real(self.f_hat_fit)),
            format!("f_hat_smc = {}", fmt_real(self.f_hat_smc)),
            format!("mu_f = {}", fmt_real(a.mu_f)),
            format!("mu_g = {}", fmt_real(a.mu_g)),
            format!("sigma_f = {}", fmt_real(a.sigma_f)),
            format!("sigma_g = {}", fmt_real(a.sigma_g)),
            format!("cov_fg = {}", fmt_real(a.cov_fg)),
            format!("rho = {}", fmt_real(a.rho)),
            format!("alpha = {}", fmt_real(a.alpha)),
            format!("eim = {}", fmt_real(self.eim)),
            format!("guard_triggered = {}", self.guard_triggered),
        ];
        for (i, f) in self.per_fold.iter().enumerate() {
            let i = i + 1;
            lines.push(format!("fold{i}.g_hat = {}", fmt_real(f.g_hat)));
            lines.push(format!("fold{i}.correction = {}", fmt_real(f.correction)));
            lines.push(format!("fold{i}.corrected = {}", fmt_real(f.corrected)));
            lines.push(format!("fold{i}.likelihood = {}", fmt_real(f.likelihood)));
        }
        lines.join("\n") + "\n"
    }
}

/// Scientific notation with 17 significant digits; parses back to the same `f64`.
pub fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Stacked Monte Carlo estimate of `∫ f(x) p(x) dx` from samples of `p`.
pub fn stackmc_estimate(
    dataset: &Dataset,
    dist: &DistributionSpec,
    spec: &FitterSpec,
    config: &StackConfig,
) -> Result<StackReport> {
    check_dims(dist.dims(), dataset.dims())?;
    check_dims(spec.dims, dataset.dims())?;
    stack(&dataset.points, &dataset.values, dist, spec, config)
}

/// Stacked Monte Carlo with samples drawn from `q` and target density `p`.
///
/// Every use of `f` is replaced by `f p / q`, and the fold surrogates are
/// integrated against `q`.
pub fn stackmc_is_estimate(
    dataset: &Dataset,
    p: &DistributionSpec,
    q: &DistributionSpec,
    spec: &FitterSpec,
    config: &StackConfig,
) -> Result<StackReport> {
    check_dims(spec.dims, dataset.dims())?;
    let weighted = weighted_values(dataset, p, q)?;
    stack(&dataset.points, &weighted, q, spec, config)
}

fn stack(
    points: &SampleMatrix,
    values: &[f64],
    dist: &DistributionSpec,
    spec: &FitterSpec,
    config: &StackConfig,
) -> Result<StackReport> {
    let n = values.len();
    let mc = mc_estimate(values)?;
    let partition = match &config.partition {
        Some(p) => {
            if p.n() != n {
                return Err(StackMcError::Shape { expected: n, got: p.n() });
            }
            p.clone()
        }
        None => partition_folds(n, config.k, rng::purpose_seed(config.seed, Purpose::Folds))?,
    };
    let k = partition.k();
    let p = spec.n_params();
    if let Some(small) = (0..k).map(|f| n - partition.test(f).len()).find(|&m| m < p) {
        return Err(StackMcError::InsufficientData { needed: p, have: small });
    }

    let g_hat_seed = rng::purpose_seed(config.seed, Purpose::GHat);
    let expectation = |model: &FitModel, stream: u64| -> Result<f64> {
        let mc_n = |n_g: Option<usize>| n_g.unwrap_or_else(|| default_mc_samples(n));
        let seed = rng::derive_seed(g_hat_seed, &[stream]);
        match config.g_hat {
            GHatMethod::Analytic => model.analytic_expectation(dist),
            GHatMethod::MonteCarlo { n_g } => model.mc_expectation(dist, mc_n(n_g), seed),
            GHatMethod::Auto => match model.analytic_expectation(dist) {
                Err(StackMcError::UnsupportedIntegral { .. }) => model.mc_expectation(dist, mc_n(None), seed),
                other => other,
            },
        }
    };
    let offset = config.g_hat_offset_sigmas * mc.sigma;

    let mut models = Vec::with_capacity(k);
    let mut heldout = vec![0.0; n];
    for fold in 0..k {
        let train = partition.train(fold);
        let train_values: Vec<f64> = train.iter().map(|&i| values[i]).collect();
        let model = spec.fit(&points.select(&train), &train_values).map_err(|e| with_fold(e, fold))?;
        for &i in partition.test(fold) {
            heldout[i] = model.predict_unchecked(points.row(i));
        }
        models.push(model);
    }
    if let Some(i) = heldout.iter().position(|v| !v.is_finite()) {
        return Err(StackMcError::Numeric { fold: partition.labels()[i], what: "non-finite held-out prediction".into() });
    }

    let mut alpha_stats = compute_alpha(&heldout, values)?;
    if let Some(a) = config.alpha_override {
        alpha_stats.alpha = a;
    }
    let alpha = alpha_stats.alpha;

    let mut g_hats = Vec::with_capacity(k);
    for (fold, model) in models.iter().enumerate() {
        let g = expectation(model, fold as u64).map_err(|e| with_fold(e, fold))? + offset;
        if !g.is_finite() {
            return Err(StackMcError::Numeric { fold, what: "non-finite surrogate expectation".into() });
        }
        g_hats.push(g);
    }
    let (guard_triggered, likelihoods) = eim_guard(&g_hats, mc.mean, mc.eim, config.c_guard);

    let per_fold: Vec<FoldEstimate> = models
        .into_iter()
        .enumerate()
        .map(|(fold, model)| {
            let test = partition.test(fold);
            let residuals: Vec<f64> = test.iter().map(|&i| values[i] - alpha * heldout[i]).collect();
            let correction = stats::mean(&residuals);
            FoldEstimate {
                beta: model.beta,
                test_size: test.len(),
                g_hat: g_hats[fold],
                correction,
                corrected: alpha * g_hats[fold] + correction,
                likelihood: likelihoods[fold],
            }
        })
        .collect();

    let f_hat_smc = if guard_triggered {
        mc.mean
    } else if alpha_stats.constant_values {
        alpha_stats.mu_f
    } else {
        stats::mean(&per_fold.iter().map(|f| f.corrected).collect::<Vec<_>>())
    };
    let f_hat_fit = expectation(&spec.fit(points, values)?, k as u64)?;

    Ok(StackReport {
        f_hat_mc: mc.mean,
        f_hat_fit,
        f_hat_smc,
        alpha_stats,
        per_fold,
        eim: mc.eim,
        guard_triggered,
        k,
        n,
        seed: config.seed,
    })
}

fn with_fold(err: StackMcError, fold: usize) -> StackMcError {
    match err {
        StackMcError::Numeric { what, .. } => StackMcError::Numeric { fold, what },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mc_estimate_basics() {
        let e = mc_estimate(&[3.5; 8]).unwrap();
        assert_eq!((e.mean, e.sigma, e.eim), (3.5, 0.0, 0.0));
        let e = mc_estimate(&[0.0, 2.0]).unwrap();
        assert_eq!(e.mean, 1.0);
        assert!((e.sigma - 2f64.sqrt()).abs() < 1e-15);
        assert!((e.eim - 1.0).abs() < 1e-15);
        assert!(matches!(mc_estimate(&[1.0]), Err(StackMcError::InsufficientData { .. })));
    }

    #[test]
    fn partition_sizes() {
        let p = partition_folds(20, 5, 1).unwrap();
        assert!(p.sets().iter().all(|s| s.len() == 4));
        let p = partition_folds(10, 10, 1).unwrap();
        assert!(p.sets().iter().all(|s| s.len() == 1));
        let p = partition_folds(23, 10, 1).unwrap();
        let sizes: Vec<usize> = p.sets().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 3, 3, 2, 2, 2, 2, 2, 2, 2]);
        assert!(partition_folds(5, 6, 1).is_err());
        assert!(partition_folds(5, 1, 1).is_err());
        assert_eq!(partition_folds(30, 7, 9).unwrap(), partition_folds(30, 7, 9).unwrap());
    }

    #[test]
    fn explicit_partitions_validated() {
        assert!(FoldPartition::from_sets(4, vec![vec![0, 1], vec![2, 3]]).is_ok());
        assert!(FoldPartition::from_sets(4, vec![vec![0, 1], vec![1, 3]]).is_err());
        assert!(FoldPartition::from_sets(4, vec![vec![0, 1], vec![2]]).is_err());
        assert!(FoldPartition::from_sets(4, vec![vec![0, 1, 2, 3]]).is_err());
        let p = FoldPartition::from_labels(&[1, 0, 1, 0, 2]).unwrap();
        assert_eq!(p.test(0), &[1, 3]);
        assert_eq!(p.train(0), vec![0, 2, 4]);
        assert_eq!(p.labels(), vec![1, 0, 1, 0, 2]);
    }

    #[test]
    fn alpha_edge_cases() {
        let f = [1.0, 4.0, 2.0, 8.0];
        let a = compute_alpha(&f, &f).unwrap();
        assert!((a.rho - 1.0).abs() < 1e-15 && (a.alpha - 1.0).abs() < 1e-15);
        let a = compute_alpha(&[2.0; 4], &f).unwrap();
        assert_eq!((a.sigma_g, a.rho, a.alpha), (0.0, 0.0, 0.0));
        let a = compute_alpha(&f, &[3.0; 4]).unwrap();
        assert!(a.constant_values);
        assert!(compute_alpha(&f, &f[..3]).is_err());
    }

    #[test]
    fn guard_cases() {
        let (t, l) = eim_guard(&[1.0, 1.0], 1.0, 0.5, 5.0);
        assert!(!t && l == vec![0.0, 0.0]);
        let (t, _) = eim_guard(&[0.0, 6.0], 0.0, 1.0, 5.0);
        assert!(t);
        let (t, _) = eim_guard(&[0.0, 5.0], 0.0, 1.0, 5.0);
        assert!(!t);
        let (t, _) = eim_guard(&[2.0, 2.0], 2.0, 0.0, 5.0);
        assert!(!t);
        let (t, l) = eim_guard(&[2.0, 2.1], 2.0, 0.0, 5.0);
        assert!(t && l[1].is_infinite());
    }

    #[test]
    fn importance_sampling_basics() {
        let p: DistributionSpec = "uniform(0,1)".parse().unwrap();
        let ds = Dataset::new(SampleMatrix::from_column(&[0.5]), vec![2.0]).unwrap();
        assert_eq!(is_estimate(&ds, &p, &p).unwrap(), 2.0);
        let q: DistributionSpec = "uniform(0,0.4)".parse().unwrap();
        assert!(matches!(is_estimate(&ds, &p, &q), Err(StackMcError::DegenerateWeight { index: 0 })));
    }

    #[test]
    fn insufficient_training_data() {
        let dist: DistributionSpec = "uniform(-1,1)".parse().unwrap();
        let spec = FitterSpec::polynomial(3, 1).unwrap();
        let ds = Dataset::generate(&dist, 8, 1, |x| x[0].exp()).unwrap();
        assert!(stackmc_estimate(&ds, &dist, &spec, &StackConfig::new(2, 5.0, 1)).is_ok());
        // Five points in two folds leave a training set of two.
        let ds = Dataset::generate(&dist, 5, 1, |x| x[0].exp()).unwrap();
        assert!(matches!(
            stackmc_estimate(&ds, &dist, &spec, &StackConfig::new(2, 5.0, 1)),
            Err(StackMcError::InsufficientData { needed: 4, have: 2 })
        ));
    }

    #[test]
    fn dataset_rejects_non_finite() {
        assert!(Dataset::new(SampleMatrix::from_column(&[0.0, 1.0]), vec![1.0, f64::NAN]).is_err());
        assert!(Dataset::new(SampleMatrix::from_column(&[0.0, 1.0]), vec![1.0]).is_err());
    }

    #[test]
    fn fmt_real_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 123456.789, 0.0] {
            assert_eq!(fmt_real(v).parse::<f64>().unwrap(), v);
        }
    }
}
