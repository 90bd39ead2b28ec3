//! Kolmogorov-Smirnov goodness-of-fit against a centred Gaussian.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    /// Asymptotic p-value bound from the Kolmogorov distribution series.
    pub p_value: f64,
    pub num_samples: usize,
}

fn normal_cdf(x: f64, sd: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / (sd * std::f64::consts::SQRT_2)))
}

/// Survival function of the Kolmogorov distribution at t = sqrt(n) D.
///
/// Alternating series 2 sum (-1)^{k-1} e^{-2 k^2 t^2} for t >= 1; the
/// Jacobi-theta form for small t where that series converges slowly.
fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 1.0 {
        let factor = (2.0 * std::f64::consts::PI).sqrt() / t;
        let mut cdf = 0.0;
        for k in 1..=20u32 {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * std::f64::consts::PI.powi(2) / (8.0 * t * t)).exp();
            cdf += term;
            if term < 1e-18 {
                break;
            }
        }
        (1.0 - factor * cdf).clamp(0.0, 1.0)
    } else {
        let mut sf = 0.0;
        for k in 1..=20u32 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let term = (-2.0 * (k as f64).powi(2) * t * t).exp();
            sf += sign * 2.0 * term;
            if term < 1e-18 {
                break;
            }
        }
        sf.clamp(0.0, 1.0)
    }
}

/// Two-sided KS test of `samples` against N(0, target_sd^2).
pub fn ks_normality_test(samples: &[f64], target_sd: f64) -> Result<KsResult> {
    if samples.len() < 200 {
        return Err(Error::config(format!(
            "ks_normality_test: need at least 200 samples, got {}",
            samples.len()
        )));
    }
    if !(target_sd > 0.0) {
        return Err(Error::config("ks_normality_test: target_sd must be > 0"));
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = normal_cdf(x, target_sd);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf(n.sqrt() * d),
        num_samples: xs.len(),
    })
}
