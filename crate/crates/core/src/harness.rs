//! Repeated-trial experiments and file I/O.
//!
//! A sweep runs the plain Monte Carlo, fit-all and stacked estimators on
//! fresh samples for every `(n, trial)` cell and summarises squared errors
//! against a reference value. Cells are seeded from `(root seed, n, trial)`
//! only, so results do not depend on execution order or on which other
//! sample counts are in the sweep.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rayon::prelude::*;

use crate::distributions::{DistributionSpec, SampleMatrix};
use crate::error::{Result, StackMcError};
use crate::estimators::{fmt_real, stackmc_estimate, Dataset, StackConfig, StackReport, DEFAULT_FOLDS, DEFAULT_GUARD};
use crate::fitters::{FitterFamily, FitterSpec};
use crate::rng::{self, Purpose};
use crate::stats;
use crate::testfunctions::TestFunction;

pub const DEFAULT_TRIALS: usize = 2000;

/// Where trial samples come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Fresh draws from the distribution, evaluated with a registered function.
    Function(TestFunction),
    /// Subsets drawn without replacement from a fixed pool of evaluated
    /// samples. The reference value defaults to the pool mean.
    Samples { pool: Dataset, truth: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: Source,
    pub dist: DistributionSpec,
    pub fitter: FitterFamily,
    pub k: usize,
    pub c_guard: f64,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Diagnostic shift of every fold's surrogate integral, in units of σ_f.
    pub g_hat_offset_sigmas: f64,
}

impl ExperimentConfig {
    pub fn new(source: Source, dist: DistributionSpec, fitter: FitterFamily, n_values: Vec<usize>) -> Self {
        ExperimentConfig {
            source,
            dist,
            fitter,
            k: DEFAULT_FOLDS,
            c_guard: DEFAULT_GUARD,
            n_values,
            trials: DEFAULT_TRIALS,
            seed: 0,
            g_hat_offset_sigmas: 0.0,
        }
    }

    pub fn fitter_spec(&self) -> Result<FitterSpec> {
        FitterSpec::new(self.fitter, self.dist.dims())
    }

    /// Checks every trial can run and returns the reference value.
    pub fn validate(&self) -> Result<f64> {
        let cfg = |msg: String| StackMcError::Config(msg);
        if self.trials == 0 {
            return Err(cfg("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(cfg("no sample counts given".into()));
        }
        if self.k < 2 {
            return Err(cfg(format!("k must be at least 2, got {}", self.k)));
        }
        if self.c_guard.is_nan() || self.c_guard < 0.0 {
            return Err(cfg(format!("guard threshold must be non-negative, got {}", self.c_guard)));
        }
        let p = self.fitter_spec().map_err(|e| cfg(e.to_string()))?.n_params();
        for &n in &self.n_values {
            if n < self.k {
                return Err(cfg(format!("n={n} is smaller than k={}", self.k)));
            }
            let train = n - n.div_ceil(self.k);
            if train < p {
                return Err(cfg(format!(
                    "n={n} with k={} leaves {train} training points; {} needs {p}",
                    self.k, self.fitter
                )));
            }
        }
        match &self.source {
            Source::Function(f) => {
                if f.dims() != self.dist.dims() {
                    return Err(cfg(format!("{f} needs {} dimensions, distribution has {}", f.dims(), self.dist.dims())));
                }
                f.true_expectation(&self.dist).map(|r| r.value).map_err(|e| cfg(e.to_string()))
            }
            Source::Samples { pool, truth } => {
                if pool.dims() != self.dist.dims() {
                    return Err(cfg(format!("samples have {} columns, distribution has {}", pool.dims(), self.dist.dims())));
                }
                if let Some(&n) = self.n_values.iter().find(|&&n| n > pool.len()) {
                    return Err(cfg(format!("n={n} exceeds the {} available samples", pool.len())));
                }
                Ok(truth.unwrap_or_else(|| stats::mean(&pool.values)))
            }
        }
    }

    fn trial_dataset(&self, n: usize, seed: u64) -> Result<Dataset> {
        match &self.source {
            Source::Function(f) => {
                let mut rng = rng::purpose_stream(seed, Purpose::Samples);
                let points = self.dist.sample_with(n, &mut rng);
                let values = points.rows().map(|x| f.eval(x)).collect();
                Dataset::new(points, values)
            }
            Source::Samples { pool, .. } => {
                let mut rng = rng::purpose_stream(seed, Purpose::Subsample);
                let mut picks = index::sample(&mut rng, pool.len(), n).into_vec();
                picks.sort_unstable();
                let values = picks.iter().map(|&i| pool.values[i]).collect();
                Dataset::new(pool.points.select(&picks), values)
            }
        }
    }

    /// Stacked configuration for one trial.
    pub fn stack_config(&self, seed: u64) -> StackConfig {
        StackConfig { g_hat_offset_sigmas: self.g_hat_offset_sigmas, ..StackConfig::new(self.k, self.c_guard, seed) }
    }
}

/// One trial of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub f_hat_mc: f64,
    pub f_hat_fit: f64,
    pub f_hat_smc: f64,
    pub alpha: f64,
    pub rho: f64,
    pub guard_triggered: bool,
}

impl ResultRow {
    pub const HEADER: [&'static str; 9] =
        ["n", "trial", "seed", "f_hat_mc", "f_hat_fit", "f_hat_smc", "alpha", "rho", "guard_triggered"];

    fn from_report(trial: usize, r: &StackReport) -> Self {
        ResultRow {
            n: r.n,
            trial,
            seed: r.seed,
            f_hat_mc: r.f_hat_mc,
            f_hat_fit: r.f_hat_fit,
            f_hat_smc: r.f_hat_smc,
            alpha: r.alpha_stats.alpha,
            rho: r.alpha_stats.rho,
            guard_triggered: r.guard_triggered,
        }
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
            fmt_real(self.f_hat_mc),
            fmt_real(self.f_hat_fit),
            fmt_real(self.f_hat_smc),
            fmt_real(self.alpha),
            fmt_real(self.rho),
            self.guard_triggered.to_string(),
        ]
    }
}

/// Per-`n` aggregate of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub trials: usize,
    pub mse_mc: f64,
    pub mse_fit: f64,
    pub mse_smc: f64,
    pub guard_rate: f64,
    pub median_se_mc: f64,
    pub median_se_fit: f64,
    pub median_se_smc: f64,
    pub mean_mc: f64,
    pub mean_fit: f64,
    pub mean_smc: f64,
    /// Trial standard deviations of each estimator.
    pub std_mc: f64,
    pub std_fit: f64,
    pub std_smc: f64,
}

impl SummaryRow {
    pub const HEADER: [&'static str; 14] = [
        "n",
        "mse_mc",
        "mse_fit",
        "mse_smc",
        "guard_rate",
        "median_se_mc",
        "median_se_fit",
        "median_se_smc",
        "mean_mc",
        "mean_fit",
        "mean_smc",
        "std_mc",
        "std_fit",
        "std_smc",
    ];

    fn record(&self) -> Vec<String> {
        let mut rec = vec![self.n.to_string()];
        rec.extend(
            [
                self.mse_mc,
                self.mse_fit,
                self.mse_smc,
                self.guard_rate,
                self.median_se_mc,
                self.median_se_fit,
                self.median_se_smc,
                self.mean_mc,
                self.mean_fit,
                self.mean_smc,
                self.std_mc,
                self.std_fit,
                self.std_smc,
            ]
            .iter()
            .map(|v| fmt_real(*v)),
        );
        rec
    }

    /// `|mean − truth| / (std / √trials)` for one estimator's column.
    pub fn bias_z(mean: f64, std: f64, trials: usize, truth: f64) -> f64 {
        (mean - truth).abs() / (std / (trials as f64).sqrt())
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn spread(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        0.0
    } else {
        stats::std_dev(xs)
    }
}

/// Aggregates rows (grouped by `n`, in order of first appearance) against `truth`.
pub fn summarize(rows: &[ResultRow], truth: f64) -> Vec<SummaryRow> {
    let mut ns: Vec<usize> = Vec::new();
    for r in rows {
        if !ns.contains(&r.n) {
            ns.push(r.n);
        }
    }
    ns.into_iter()
        .map(|n| {
            let cell: Vec<&ResultRow> = rows.iter().filter(|r| r.n == n).collect();
            let col = |f: fn(&ResultRow) -> f64| cell.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let (mc, fit, smc) = (col(|r| r.f_hat_mc), col(|r| r.f_hat_fit), col(|r| r.f_hat_smc));
            let sq = |xs: &[f64]| xs.iter().map(|x| (x - truth).powi(2)).collect::<Vec<f64>>();
            let mse = |xs: &[f64]| sq(xs).iter().sum::<f64>() / xs.len() as f64;
            SummaryRow {
                n,
                trials: cell.len(),
                mse_mc: mse(&mc),
                mse_fit: mse(&fit),
                mse_smc: mse(&smc),
                guard_rate: cell.iter().filter(|r| r.guard_triggered).count() as f64 / cell.len() as f64,
                median_se_mc: median(sq(&mc)),
                median_se_fit: median(sq(&fit)),
                median_se_smc: median(sq(&smc)),
                mean_mc: stats::mean(&mc),
                mean_fit: stats::mean(&fit),
                mean_smc: stats::mean(&smc),
                std_mc: spread(&mc),
                std_fit: spread(&fit),
                std_smc: spread(&smc),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub truth: f64,
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

/// Runs every `(n, trial)` cell. Fails before any trial if the config is infeasible.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    let truth = config.validate()?;
    let spec = config.fitter_spec()?;
    let cells: Vec<(usize, usize)> =
        config.n_values.iter().flat_map(|&n| (0..config.trials).map(move |t| (n, t))).collect();
    let mut rows = cells
        .par_iter()
        .map(|&(n, trial)| {
            let seed = rng::trial_seed(config.seed, n, trial);
            let data = config.trial_dataset(n, seed)?;
            let report = stackmc_estimate(&data, &config.dist, &spec, &config.stack_config(seed))?;
            Ok(ResultRow::from_report(trial, &report))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.trial));
    let summary = summarize(&rows, truth);
    Ok(SweepResult { truth, rows, summary })
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> StackMcError {
    StackMcError::Io { path: path.to_path_buf(), msg: e.to_string() }
}

fn csv_line(e: &csv::Error) -> usize {
    e.position().map_or(0, |p| p.line() as usize)
}

/// Reads a CSV of `x1..xD,f` columns.
pub fn ingest_samples(path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| io_err(path, e))?;
    let headers = reader.headers().map_err(|e| StackMcError::Parse { line: 1, msg: e.to_string() })?.clone();
    let parse = |line: usize, msg: String| StackMcError::Parse { line, msg };
    let cols: Vec<&str> = headers.iter().collect();
    if cols.last() != Some(&"f") {
        return Err(parse(1, "last column must be named f".into()));
    }
    let dims = cols.len() - 1;
    if dims == 0 {
        return Err(parse(1, "no x columns".into()));
    }
    for (j, name) in cols[..dims].iter().enumerate() {
        if *name != format!("x{}", j + 1) {
            return Err(parse(1, format!("expected column x{}, found {name:?}", j + 1)));
        }
    }
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse(csv_line(&e), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != dims + 1 {
            return Err(parse(line, format!("expected {} fields, found {}", dims + 1, record.len())));
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| parse(line, format!("non-numeric value {cell:?}")))?;
            if !v.is_finite() {
                return Err(parse(line, format!("non-finite value {cell:?}")));
            }
            if j < dims {
                xs.push(v);
            } else {
                fs.push(v);
            }
        }
    }
    if fs.len() < 2 {
        return Err(parse(1, format!("need at least 2 data rows, found {}", fs.len())));
    }
    Dataset::new(SampleMatrix::from_rows(dims, xs)?, fs)
}

/// Writes a dataset in the layout read by [`ingest_samples`].
pub fn write_samples(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    let mut header: Vec<String> = (1..=dataset.dims()).map(|j| format!("x{j}")).collect();
    header.push("f".into());
    w.write_record(&header).map_err(|e| io_err(path, e))?;
    for (x, f) in dataset.points.rows().zip(&dataset.values) {
        let mut rec: Vec<String> = x.iter().map(|v| fmt_real(*v)).collect();
        rec.push(fmt_real(*f));
        w.write_record(&rec).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Reads back a `rows.csv` written by [`emit_outputs`].
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let headers = reader.headers().map_err(|e| StackMcError::Parse { line: 1, msg: e.to_string() })?;
    if headers.iter().ne(ResultRow::HEADER) {
        return Err(StackMcError::Parse { line: 1, msg: "unexpected header".into() });
    }
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| StackMcError::Parse { line: csv_line(&e), msg: e.to_string() })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let bad = |what: &str| StackMcError::Parse { line, msg: format!("bad {what}") };
            let real = |i: usize, what: &str| rec[i].parse::<f64>().map_err(|_| bad(what));
            Ok(ResultRow {
                n: rec[0].parse().map_err(|_| bad("n"))?,
                trial: rec[1].parse().map_err(|_| bad("trial"))?,
                seed: rec[2].parse().map_err(|_| bad("seed"))?,
                f_hat_mc: real(3, "f_hat_mc")?,
                f_hat_fit: real(4, "f_hat_fit")?,
                f_hat_smc: real(5, "f_hat_smc")?,
                alpha: real(6, "alpha")?,
                rho: real(7, "rho")?,
                guard_triggered: rec[8].parse().map_err(|_| bad("guard_triggered"))?,
            })
        })
        .collect()
}

fn write_csv(path: &Path, header: &[&str], records: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for rec in records {
        w.write_record(&rec).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub rows: PathBuf,
    pub summary: PathBuf,
    pub plot: PathBuf,
}

/// Writes `rows.csv`, `summary.csv` and `plot.gp` into `dir`.
pub fn emit_outputs(rows: &[ResultRow], summary: &[SummaryRow], dir: &Path) -> Result<OutputFiles> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let files = OutputFiles { rows: dir.join("rows.csv"), summary: dir.join("summary.csv"), plot: dir.join("plot.gp") };
    write_csv(&files.rows, &ResultRow::HEADER, rows.iter().map(ResultRow::record))?;
    write_csv(&files.summary, &SummaryRow::HEADER, summary.iter().map(SummaryRow::record))?;
    let mut f = fs::File::create(&files.plot).map_err(|e| io_err(&files.plot, e))?;
    f.write_all(plot_script(summary).as_bytes()).map_err(|e| io_err(&files.plot, e))?;
    Ok(files)
}

/// Gnuplot script drawing log-log MSE against N, data inlined.
pub fn plot_script(summary: &[SummaryRow]) -> String {
    let mut s = String::new();
    s.push_str("# Mean squared error against sample count.\n");
    s.push_str("set terminal pngcairo size 800,600\n");
    s.push_str("set output 'mse.png'\n");
    s.push_str("set logscale xy\n");
    s.push_str("set xlabel 'Number of samples N'\n");
    s.push_str("set ylabel 'Mean squared error'\n");
    s.push_str("set key top right\n");
    s.push_str("set grid\n");
    s.push_str("$mse << EOD\n");
    s.push_str("# n mse_mc mse_fit mse_smc\n");
    for r in summary {
        s.push_str(&format!("{} {} {} {}\n", r.n, fmt_real(r.mse_mc), fmt_real(r.mse_fit), fmt_real(r.mse_smc)));
    }
    s.push_str("EOD\n");
    s.push_str("plot $mse using 1:2 with linespoints lw 2 lc rgb '#1a9641' title 'Monte Carlo', \\\n");
    s.push_str("     $mse using 1:3 with linespoints lw 2 lc rgb '#d7191c' title 'Fit to all samples', \\\n");
    s.push_str("     $mse using 1:4 with linespoints lw 2 lc rgb '#2c7bb6' title 'StackMC'\n");
    s
}

/// Mean and standard deviation from two stacked runs, on `f` and on `f²`.
#[derive(Debug, Clone, PartialEq)]
pub struct StdEstimate {
    pub mean: f64,
    pub second_moment: f64,
    pub std: f64,
    /// Set when `E[f²] − E[f]²` came out negative and the std was clamped to 0.
    pub clamped: bool,
    pub first: StackReport,
    pub second: StackReport,
}

pub fn estimate_std(
    dataset: &Dataset,
    dist: &DistributionSpec,
    spec: &FitterSpec,
    config: &StackConfig,
) -> Result<StdEstimate> {
    let first = stackmc_estimate(dataset, dist, spec, config)?;
    let squared = dataset.map_values(|v| v * v)?;
    let second = stackmc_estimate(&squared, dist, spec, config)?;
    let mean = first.f_hat_smc;
    let radicand = second.f_hat_smc - mean * mean;
    let clamped = radicand < 0.0;
    let std = if clamped { 0.0 } else { radicand.sqrt() };
    Ok(StdEstimate { mean, second_moment: second.f_hat_smc, std, clamped, first, second })
}
