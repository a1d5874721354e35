//! Analytic objective functions with known expectations.

use std::fmt;

use crate::distributions::{Basis, DistributionSpec, Marginal};
use crate::error::{Result, StackMcError};
use crate::quadrature;

/// Coefficients (ascending powers) of the one-dimensional worked-example sextic.
pub const POLY1D_COEFFS: [f64; 7] = [0.3, -4.81, 19.05, -6.47, -30.43, 1.2, 1.0];

/// The same sextic scaled by three.
pub const POLY1D_PROSE_COEFFS: [f64; 7] = [0.9, -14.43, 57.15, -19.41, -91.29, 3.6, 3.0];

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// `x⁶ + 1.2x⁵ − 30.43x⁴ − 6.47x³ + 19.05x² − 4.81x + 0.3`.
pub fn eval_poly1d(x: f64) -> f64 {
    horner(&POLY1D_COEFFS, x)
}

pub fn eval_poly1d_prose(x: f64) -> f64 {
    horner(&POLY1D_PROSE_COEFFS, x)
}

fn require_pairs(dims: usize) -> Result<()> {
    if dims < 2 {
        Err(StackMcError::Parameter(format!("chain functions need at least 2 dimensions, got {dims}")))
    } else {
        Ok(())
    }
}

/// Sum of `h(x_i, x_{i+1})` over successive coordinates.
pub fn chain_sum<H: Fn(f64, f64) -> f64>(x: &[f64], h: H) -> Result<f64> {
    require_pairs(x.len())?;
    Ok(x.windows(2).map(|w| h(w[0], w[1])).sum())
}

/// `Σ (1 − x_i)² + 100 (x_{i+1} − x_i²)²`.
pub fn eval_rosenbrock(x: &[f64]) -> Result<f64> {
    chain_sum(x, rosenbrock_pair)
}

fn rosenbrock_pair(x: f64, y: f64) -> f64 {
    (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
}

/// Stand-in pair term for the butterfly chain:
/// `sin(3x) sin(3y) + 0.5 |x y| + cos(x² − y)`.
///
/// The original pair function is only available as a contour plot, so this
/// is a substitute with the same role: oscillatory, non-additive and hard
/// for a per-dimension Fourier basis.
pub fn butterfly_pair(x: f64, y: f64) -> f64 {
    (3.0 * x).sin() * (3.0 * y).sin() + 0.5 * (x * y).abs() + (x * x - y).cos()
}

pub fn eval_btbutterfly<H: Fn(f64, f64) -> f64>(x: &[f64], h: H) -> Result<f64> {
    chain_sum(x, h)
}

/// Reference value of an expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub value: f64,
    /// Bound on |value − truth|; zero up to rounding for closed forms.
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    Poly1d,
    Poly1dProse,
    Rosenbrock { dims: usize },
    BtButterfly { dims: usize },
}

impl TestFunction {
    /// Looks up a function by CLI name. `dims` is ignored by the 1-D functions.
    pub fn by_name(name: &str, dims: usize) -> Result<Self> {
        let f = match name {
            "poly1d" => TestFunction::Poly1d,
            "poly1d_prose" => TestFunction::Poly1dProse,
            "rosenbrock" => TestFunction::Rosenbrock { dims },
            "btbutterfly" => TestFunction::BtButterfly { dims },
            other => return Err(StackMcError::Parameter(format!("unknown function {other:?}"))),
        };
        if let TestFunction::Rosenbrock { dims } | TestFunction::BtButterfly { dims } = f {
            require_pairs(dims)?;
        }
        Ok(f)
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Poly1d => "poly1d",
            TestFunction::Poly1dProse => "poly1d_prose",
            TestFunction::Rosenbrock { .. } => "rosenbrock",
            TestFunction::BtButterfly { .. } => "btbutterfly",
        }
    }

    pub fn dims(&self) -> usize {
        match *self {
            TestFunction::Poly1d | TestFunction::Poly1dProse => 1,
            TestFunction::Rosenbrock { dims } | TestFunction::BtButterfly { dims } => dims,
        }
    }

    /// Evaluates at a point of the right dimension. Panics on a dimension mismatch.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dims(), "{} expects {} coordinates", self.name(), self.dims());
        match self {
            TestFunction::Poly1d => eval_poly1d(x[0]),
            TestFunction::Poly1dProse => eval_poly1d_prose(x[0]),
            TestFunction::Rosenbrock { .. } => x.windows(2).map(|w| rosenbrock_pair(w[0], w[1])).sum(),
            TestFunction::BtButterfly { .. } => x.windows(2).map(|w| butterfly_pair(w[0], w[1])).sum(),
        }
    }

    /// Exact (or quadrature) expectation under `dist`.
    pub fn true_expectation(&self, dist: &DistributionSpec) -> Result<Reference> {
        let unavailable = || StackMcError::NotAvailable(format!("{} under {dist}", self.name()));
        if dist.dims() != self.dims() {
            return Err(unavailable());
        }
        let moment = |m: &Marginal, n: u32| m.basis_expectation(Basis::Monomial(n)).map_err(|_| unavailable());
        match self {
            TestFunction::Poly1d | TestFunction::Poly1dProse => {
                let coeffs = if *self == TestFunction::Poly1d { &POLY1D_COEFFS } else { &POLY1D_PROSE_COEFFS };
                let m = dist.marginal(0);
                let mut value = 0.0;
                for (n, c) in coeffs.iter().enumerate() {
                    value += c * moment(m, n as u32)?;
                }
                Ok(Reference { value, error: 0.0 })
            }
            TestFunction::Rosenbrock { .. } => {
                let mut value = 0.0;
                for w in dist.marginals().windows(2) {
                    let (x, y) = (&w[0], &w[1]);
                    let (x1, x2, x4) = (moment(x, 1)?, moment(x, 2)?, moment(x, 4)?);
                    let (y1, y2) = (moment(y, 1)?, moment(y, 2)?);
                    // E[(1-x)²] + 100 E[(y - x²)²] for independent x, y.
                    value += (1.0 - 2.0 * x1 + x2) + 100.0 * (y2 - 2.0 * y1 * x2 + x4);
                }
                Ok(Reference { value, error: 0.0 })
            }
            TestFunction::BtButterfly { .. } => {
                let mut value = 0.0;
                let mut error = 0.0;
                let mut cache: Vec<((f64, f64, f64, f64), Reference)> = Vec::new();
                for w in dist.marginals().windows(2) {
                    let (Marginal::Uniform { lo: a, hi: b }, Marginal::Uniform { lo: c, hi: d }) = (w[0], w[1]) else {
                        return Err(unavailable());
                    };
                    let key = (a, b, c, d);
                    let r = match cache.iter().find(|(k, _)| *k == key) {
                        Some((_, r)) => *r,
                        None => {
                            let r = uniform_pair_expectation(butterfly_pair, (a, b), (c, d));
                            cache.push((key, r));
                            r
                        }
                    };
                    value += r.value;
                    error += r.error;
                }
                Ok(Reference { value, error })
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Rosenbrock { dims } | TestFunction::BtButterfly { dims } => {
                write!(f, "{}-{dims}d", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

/// `E[h(x, y)]` for independent uniform `x`, `y` by nested adaptive quadrature.
///
/// Both axes are split at 0, where `|x y|` has its kink.
pub fn uniform_pair_expectation<H: Fn(f64, f64) -> f64>(h: H, x: (f64, f64), y: (f64, f64)) -> Reference {
    let inner_tol = 1e-13;
    let inner_error = std::cell::Cell::new(0.0f64);
    let outer = quadrature::integrate_with_breaks(
        |xv| {
            let q = quadrature::integrate_with_breaks(|yv| h(xv, yv), y.0, y.1, &[0.0], inner_tol, 1e-14);
            inner_error.set(inner_error.get().max(q.error));
            q.value
        },
        x.0,
        x.1,
        &[0.0],
        1e-11,
        1e-14,
    );
    let area = (x.1 - x.0) * (y.1 - y.0);
    let error = (outer.error + inner_error.get() * (x.1 - x.0)) / area;
    Reference { value: outer.value / area, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly1d_values() {
        assert!((eval_poly1d(0.4087) - 0.2438).abs() < 5e-4);
        assert_eq!(eval_poly1d(0.0), 0.3);
        assert!((eval_poly1d(-0.6950) - 7.8350).abs() < 5e-4);
        assert!((eval_poly1d_prose(0.7) - 3.0 * eval_poly1d(0.7)).abs() < 1e-12);
    }

    #[test]
    fn rosenbrock_values() {
        for d in 2..6 {
            assert_eq!(eval_rosenbrock(&vec![1.0; d]).unwrap(), 0.0);
        }
        assert_eq!(eval_rosenbrock(&[0.0; 10]).unwrap(), 9.0);
        assert_eq!(eval_rosenbrock(&[1.0, 2.0]).unwrap(), 100.0);
        assert!(eval_rosenbrock(&[1.0]).is_err());
    }

    #[test]
    fn butterfly_values() {
        assert_eq!(eval_btbutterfly(&[0.3, -1.0, 2.0], |_, _| 0.0).unwrap(), 0.0);
        assert_eq!(eval_btbutterfly(&[1.0, 1.0, 1.0], |x, y| x + y).unwrap(), 4.0);
        assert_eq!(eval_btbutterfly(&[0.0, 0.0], butterfly_pair).unwrap(), 1.0);
        assert!(eval_btbutterfly(&[0.0], butterfly_pair).is_err());
        let f = TestFunction::BtButterfly { dims: 2 };
        assert_eq!(f.eval(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn chain_additivity() {
        let x = [0.3, -1.2, 2.5, 0.7, -2.9];
        for f in [TestFunction::Rosenbrock { dims: 5 }, TestFunction::BtButterfly { dims: 5 }] {
            let pair = match f {
                TestFunction::Rosenbrock { .. } => TestFunction::Rosenbrock { dims: 2 },
                _ => TestFunction::BtButterfly { dims: 2 },
            };
            let parts: f64 = x.windows(2).map(|w| pair.eval(w)).sum();
            assert!((f.eval(&x) - parts).abs() < 1e-12);
        }
    }

    #[test]
    fn registered_truths() {
        let u1: DistributionSpec = "uniform(-1,1)".parse().unwrap();
        let t = TestFunction::Poly1d.true_expectation(&u1).unwrap();
        assert!((t.value - 0.706_857_142_857_142_9).abs() < 1e-14);
        assert!((t.value - 0.7069).abs() < 1e-4);

        let u3: DistributionSpec = "uniform(-3,3)".parse().unwrap();
        let t = TestFunction::Poly1dProse.true_expectation(&u3).unwrap();
        assert!((t.value - (-994.119_428_571_428_6)).abs() < 1e-9);

        let u10: DistributionSpec = "uniform(-3,3)^10".parse().unwrap();
        let r = TestFunction::Rosenbrock { dims: 10 };
        assert!((r.true_expectation(&u10).unwrap().value - 17316.0).abs() < 1e-9);
        let g10: DistributionSpec = "gauss(0,2)^10".parse().unwrap();
        assert!((r.true_expectation(&g10).unwrap().value - 46845.0).abs() < 1e-9);

        assert!(matches!(r.true_expectation(&u1), Err(StackMcError::NotAvailable(_))));
        let b = TestFunction::BtButterfly { dims: 3 };
        let g3: DistributionSpec = "gauss(0,2)^3".parse().unwrap();
        assert!(matches!(b.true_expectation(&g3), Err(StackMcError::NotAvailable(_))));
    }

    #[test]
    fn butterfly_truth_matches_separable_form() {
        // E[h] on [-3,3]²: the sine product vanishes by symmetry,
        // E|x| = 1.5, and E[cos(x² − y)] = E[cos x²] E[cos y] + E[sin x²] E[sin y].
        let ecos_y = 3f64.sin() / 3.0;
        let ecos_x2 = quadrature::integrate(|x: f64| (x * x).cos(), -3.0, 3.0, 1e-15, 1e-15).value / 6.0;
        let expected = 0.5 * 1.5 * 1.5 + ecos_x2 * ecos_y;
        let u: DistributionSpec = "uniform(-3,3)^4".parse().unwrap();
        let t = TestFunction::BtButterfly { dims: 4 }.true_expectation(&u).unwrap();
        assert!((t.value - 3.0 * expected).abs() < 1e-9, "{} vs {}", t.value, 3.0 * expected);
        assert!(t.error < 1e-8);
    }

    #[test]
    fn names() {
        assert_eq!(TestFunction::by_name("rosenbrock", 10).unwrap(), TestFunction::Rosenbrock { dims: 10 });
        assert!(TestFunction::by_name("rosenbrock", 1).is_err());
        assert!(TestFunction::by_name("sphere", 3).is_err());
        assert_eq!(TestFunction::by_name("poly1d", 7).unwrap().dims(), 1);
    }
}
