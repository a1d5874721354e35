use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stackmc::estimators::{fmt_real, stackmc_estimate, stackmc_is_estimate, GHatMethod, StackConfig, StackReport};
use stackmc::harness::{self, ExperimentConfig, Source};
use stackmc::{worked_example, DistributionSpec, FitterFamily, FitterSpec, StackMcError, TestFunction};

#[derive(Parser)]
#[command(name = "stackmc", version, about = "Stacked Monte Carlo integral estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GHatArg {
    Auto,
    Analytic,
    Mc,
}

#[derive(clap::Args)]
struct StackArgs {
    /// Input density, e.g. `uniform(-3,3)^10` or `beta(2,5)*beta(1,3)`
    #[arg(long)]
    dist: String,
    /// Surrogate family: `poly(n)` or `fourier(n)`
    #[arg(long)]
    fitter: String,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Guard threshold on the fold likelihoods
    #[arg(long = "c", default_value_t = 5.0)]
    c_guard: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How fold surrogates are integrated
    #[arg(long, value_enum, default_value_t = GHatArg::Auto)]
    g_hat: GHatArg,
}

impl StackArgs {
    fn parse(&self) -> Result<(DistributionSpec, FitterSpec, StackConfig), StackMcError> {
        let dist: DistributionSpec = self.dist.parse()?;
        let family: FitterFamily = self.fitter.parse()?;
        let spec = FitterSpec::new(family, dist.dims())?;
        let mut config = StackConfig::new(self.k, self.c_guard, self.seed);
        config.g_hat = match self.g_hat {
            GHatArg::Auto => GHatMethod::Auto,
            GHatArg::Analytic => GHatMethod::Analytic,
            GHatArg::Mc => GHatMethod::MonteCarlo { n_g: None },
        };
        Ok((dist, spec, config))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the expectation of one sample file
    Estimate {
        /// CSV with columns x1..xD,f
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        stack: StackArgs,
        /// Density the samples were drawn from, when it differs from --dist
        #[arg(long)]
        q: Option<String>,
        /// Also write the report as a one-row CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Repeated-trial error sweep over sample counts
    Sweep {
        /// Registered function: poly1d, poly1d_prose, rosenbrock, btbutterfly
        #[arg(long = "fn", conflicts_with = "data")]
        function: Option<String>,
        /// Pool of evaluated samples to subsample instead of a function
        #[arg(long)]
        data: Option<PathBuf>,
        /// Reference value for a sample pool (default: pool mean)
        #[arg(long, requires = "data")]
        truth: Option<f64>,
        #[command(flatten)]
        stack: StackArgs,
        /// Comma-separated sample counts
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = harness::DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value = "stackmc-out")]
        out: PathBuf,
    },
    /// Reproduce the twenty-point worked example and diff against its tables
    WorkedExample,
    /// Mean and standard deviation from two stacked runs
    Std {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        stack: StackArgs,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, StackMcError> {
    match cli.command {
        Command::Estimate { data, stack, q, csv } => {
            let (dist, spec, config) = stack.parse()?;
            let dataset = harness::ingest_samples(&data)?;
            let report = match q {
                Some(q) => {
                    let q: DistributionSpec = q.parse()?;
                    stackmc_is_estimate(&dataset, &dist, &q, &spec, &config)?
                }
                None => stackmc_estimate(&dataset, &dist, &spec, &config)?,
            };
            print!("{}", report.to_kv_block());
            if let Some(path) = csv {
                write_report_csv(&report, &path)?;
            }
        }
        Command::Sweep { function, data, truth, stack, n, trials, out } => {
            let (dist, spec, _) = stack.parse()?;
            let source = match (function, data) {
                (Some(name), None) => Source::Function(TestFunction::by_name(&name, dist.dims())?),
                (None, Some(path)) => Source::Samples { pool: harness::ingest_samples(&path)?, truth },
                _ => return Err(StackMcError::Config("give exactly one of --fn or --data".into())),
            };
            let config = ExperimentConfig {
                k: stack.k,
                c_guard: stack.c_guard,
                trials,
                seed: stack.seed,
                ..ExperimentConfig::new(source, dist, spec.family, n)
            };
            let result = harness::run_sweep(&config)?;
            let files = harness::emit_outputs(&result.rows, &result.summary, &out)?;
            println!("truth = {}", fmt_real(result.truth));
            println!("{:>8} {:>14} {:>14} {:>14} {:>10}", "n", "mse_mc", "mse_fit", "mse_smc", "guard_rate");
            for s in &result.summary {
                println!(
                    "{:>8} {:>14.6e} {:>14.6e} {:>14.6e} {:>10.4}",
                    s.n, s.mse_mc, s.mse_fit, s.mse_smc, s.guard_rate
                );
            }
            println!("wrote {}, {}, {}", files.rows.display(), files.summary.display(), files.plot.display());
        }
        Command::WorkedExample => {
            let report = worked_example::run()?;
            let checks = worked_example::compare(&report);
            let mut failed = 0;
            for c in &checks {
                let status = if c.passed() { "PASS" } else { "FAIL" };
                failed += usize::from(!c.passed());
                println!(
                    "{status} {:<18} expected {:>10.4} got {:>10.4} (tol {:.0e})",
                    c.name, c.expected, c.actual, c.tolerance
                );
            }
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            if failed > 0 {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Std { data, stack } => {
            let (dist, spec, config) = stack.parse()?;
            let dataset = harness::ingest_samples(&data)?;
            let est = harness::estimate_std(&dataset, &dist, &spec, &config)?;
            println!("mean = {}", fmt_real(est.mean));
            println!("second_moment = {}", fmt_real(est.second_moment));
            println!("std = {}", fmt_real(est.std));
            if est.clamped {
                eprintln!("warning: negative variance estimate clamped to zero");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_report_csv(report: &StackReport, path: &std::path::Path) -> Result<(), StackMcError> {
    let io = |e: csv::Error| StackMcError::Io { path: path.to_path_buf(), msg: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(StackReport::CSV_HEADER).map_err(io)?;
    w.write_record(report.csv_record()).map_err(io)?;
    w.flush().map_err(|e| StackMcError::Io { path: path.to_path_buf(), msg: e.to_string() })
}
