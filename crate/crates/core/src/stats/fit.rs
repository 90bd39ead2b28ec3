//! Least-squares slope fits for rate-exponent checks.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// Half-width of the reported confidence interval (2 se).
    pub ci_half_width: f64,
}

/// Ordinary least squares of y against x.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::config(
            "linear_fit: need at least 3 points with matching lengths",
        ));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::config("linear_fit: degenerate abscissae"));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_se = (ss_res / (n - 2.0).max(1.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        slope_se,
        ci_half_width: 2.0 * slope_se,
    })
}

/// Least-squares slope of log y against log x.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.iter().any(|&x| x <= 0.0) || ys.iter().any(|&y| y <= 0.0) {
        return Err(Error::config("log_log_fit: inputs must be positive"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let xs = [256.0, 512.0, 1024.0, 2048.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.75)).collect();
        let fit = log_log_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.75).abs() < 1e-12);
        assert!(fit.slope_se < 1e-12);
    }

    #[test]
    fn noisy_slope_has_honest_error_bar() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let ys = [1.02, 1.97, 3.1, 3.9, 5.05, 6.02];
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope - 1.0).abs() < 3.0 * fit.slope_se + 0.05);
        assert!(fit.slope_se > 0.0);
    }

    #[test]
    fn two_points_is_a_config_error() {
        assert!(matches!(
            linear_fit(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::Config(_))
        ));
    }
}
