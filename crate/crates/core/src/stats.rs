//! Sample statistics with the 1/(N-1) convention.

/// Arithmetic mean, accumulated relative to the first element so that a
/// constant slice returns that constant exactly.
pub fn mean(xs: &[f64]) -> f64 {
    match xs.first() {
        None => f64::NAN,
        Some(&x0) => x0 + xs.iter().map(|x| x - x0).sum::<f64>() / xs.len() as f64,
    }
}

/// Unbiased sample variance about `mu`.
pub fn variance_about(xs: &[f64], mu: f64) -> f64 {
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance_about(xs, mean(xs)).sqrt()
}

/// Unbiased sample covariance given precomputed means.
pub fn covariance_about(xs: &[f64], ys: &[f64], mx: f64, my: f64) -> f64 {
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Standard error of the mean, `std / sqrt(N)`.
pub fn std_error(xs: &[f64]) -> f64 {
    std_dev(xs) / (xs.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_mean_is_exact() {
        let xs = vec![0.1; 37];
        assert_eq!(mean(&xs), 0.1);
        assert_eq!(std_dev(&xs), 0.0);
    }

    #[test]
    fn two_points() {
        assert_eq!(mean(&[0.0, 2.0]), 1.0);
        assert_eq!(std_dev(&[0.0, 2.0]), 2f64.sqrt());
        assert_eq!(covariance_about(&[0.0, 2.0], &[1.0, 3.0], 1.0, 2.0), 2.0);
    }
}
