//! Stacked Monte Carlo.
//!
//! Post-processes a set of Monte Carlo samples with k-fold cross-validated
//! surrogate fits used as control variates. The result keeps the
//! unbiasedness of plain Monte Carlo while borrowing the accuracy of the
//! surrogate wherever it generalises to held-out points.
//!
//! ```
//! use stackmc::{Dataset, DistributionSpec, FitterSpec, StackConfig, stackmc_estimate};
//!
//! let dist: DistributionSpec = "uniform(-1,1)".parse().unwrap();
//! let data = Dataset::generate(&dist, 40, 7, |x| x[0].exp()).unwrap();
//! let fitter = FitterSpec::polynomial(3, 1).unwrap();
//! let report = stackmc_estimate(&data, &dist, &fitter, &StackConfig::new(5, 5.0, 7)).unwrap();
//! assert!((report.f_hat_smc - 1.1752).abs() < 0.01);
//! ```

pub mod distributions;
pub mod error;
pub mod estimators;
pub mod fitters;
pub mod harness;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod testfunctions;
pub mod worked_example;

pub use distributions::{beta_raw_moment, Basis, DistributionSpec, Marginal, SampleMatrix};
pub use error::{Result, StackMcError};
pub use estimators::{
    compute_alpha, eim_guard, fit_all_estimate, is_estimate, mc_estimate, partition_folds, stackmc_estimate,
    stackmc_is_estimate, AlphaStats, Dataset, FoldEstimate, FoldPartition, GHatMethod, StackConfig, StackReport,
};
pub use fitters::{FitModel, FitterFamily, FitterSpec};
pub use testfunctions::TestFunction;
