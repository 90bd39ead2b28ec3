//! Moment-cumulant conversion and a deterministic verifier for the
//! cumulant expansion E f(h) h = sum_k C_{k+1}(h)/k! E f^(k)(h).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;

/// Cumulants C_1..C_k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulantVector {
    pub cumulants: Vec<f64>,
    pub source: CumulantSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CumulantSource {
    FromMoments,
    FromSamples,
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut v = 1.0f64;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Moment -> cumulant recursion
/// C_k = m_k - sum_{j=1}^{k-1} binom(k-1, j-1) C_j m_{k-j},
/// with `moments[0] = E h` first.
pub fn cumulants_from_moments(moments: &[f64]) -> Result<CumulantVector> {
    if moments.is_empty() || moments.len() > 8 {
        return Err(Error::config(
            "cumulants_from_moments: need between 1 and 8 moments",
        ));
    }
    let k_max = moments.len();
    let mut c = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut v = moments[k - 1];
        for j in 1..k {
            v -= binomial(k as u32 - 1, j as u32 - 1) * c[j - 1] * moments[k - j - 1];
        }
        c.push(v);
    }
    Ok(CumulantVector {
        cumulants: c,
        source: CumulantSource::FromMoments,
    })
}

/// Inverse recursion: m_k = sum_{j=1}^{k} binom(k-1, j-1) C_j m_{k-j}.
pub fn moments_from_cumulants(cumulants: &[f64]) -> Vec<f64> {
    let k_max = cumulants.len();
    let mut m: Vec<f64> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut v = cumulants[k - 1];
        for j in 1..k {
            v += binomial(k as u32 - 1, j as u32 - 1) * cumulants[j - 1] * m[k - j - 1];
        }
        m.push(v);
    }
    m
}

/// Sample cumulants C_1..C_4 from data (k-statistics are overkill here; the
/// plug-in estimators match the batch error bars used everywhere else).
pub fn cumulants_from_samples(samples: &[f64]) -> CumulantVector {
    let n = samples.len() as f64;
    let mean = crate::sum::sum_kahan(samples.iter().copied()) / n;
    let central = |p: i32| {
        crate::sum::sum_kahan(samples.iter().map(|x| (x - mean).powi(p))) / n
    };
    let m2 = central(2);
    let m3 = central(3);
    let m4 = central(4);
    CumulantVector {
        cumulants: vec![mean, m2, m3, m4 - 3.0 * m2 * m2],
        source: CumulantSource::FromSamples,
    }
}

/// Distribution of the scalar entry h in the expansion check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarLaw {
    Gaussian { variance: f64 },
    Rademacher,
    CenteredPoisson { lambda: f64 },
}

impl ScalarLaw {
    /// Cumulants C_1..C_k in closed form.
    pub fn cumulants(&self, k: usize) -> Vec<f64> {
        match *self {
            ScalarLaw::Gaussian { variance } => {
                let mut c = vec![0.0; k];
                if k >= 2 {
                    c[1] = variance;
                }
                c
            }
            // log cosh t = t^2/2 - t^4/12 + t^6/45 - 17 t^8/2520 + ...
            ScalarLaw::Rademacher => {
                let known = [0.0, 1.0, 0.0, -2.0, 0.0, 16.0, 0.0, -272.0];
                known[..k.min(8)].to_vec()
            }
            ScalarLaw::CenteredPoisson { lambda } => {
                let mut c = vec![lambda; k];
                if k >= 1 {
                    c[0] = 0.0;
                }
                c
            }
        }
    }

    /// Deterministic expectation E g(h) by quadrature or enumeration.
    pub fn expect(&self, g: &dyn Fn(f64) -> f64) -> Result<f64> {
        match *self {
            ScalarLaw::Gaussian { variance } => {
                let sd = variance.sqrt();
                let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
                quad::integrate_line(
                    &|x| norm * (-(x * x) / (2.0 * variance)).exp() * g(x),
                    0.0,
                    sd,
                    &[],
                    1e-12,
                )
            }
            ScalarLaw::Rademacher => Ok(0.5 * (g(1.0) + g(-1.0))),
            ScalarLaw::CenteredPoisson { lambda } => {
                let mut acc = crate::sum::KahanSum::new();
                let mut pmf = (-lambda).exp();
                let mut k = 0u32;
                loop {
                    acc.add(pmf * g(k as f64 - lambda));
                    k += 1;
                    pmf *= lambda / k as f64;
                    if pmf < 1e-18 && k as f64 > lambda + 5.0 {
                        break;
                    }
                }
                Ok(acc.value())
            }
        }
    }
}

/// Smooth scalar test function with all derivatives available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothFn {
    Sin,
    /// x^p
    Monomial(u32),
}

impl SmoothFn {
    pub fn derivative(&self, order: u32, x: f64) -> f64 {
        match *self {
            SmoothFn::Sin => (x + order as f64 * std::f64::consts::FRAC_PI_2).sin(),
            SmoothFn::Monomial(p) => {
                if order > p {
                    0.0
                } else {
                    let mut coeff = 1.0f64;
                    for i in 0..order {
                        coeff *= (p - i) as f64;
                    }
                    coeff * x.powi((p - order) as i32)
                }
            }
        }
    }

    /// Highest derivative order supplied (unbounded for these families).
    pub fn max_order(&self) -> u32 {
        u32::MAX
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionCheck {
    /// E f(h) h
    pub lhs: f64,
    /// sum_{k=0}^{l} C_{k+1}(h)/k! E f^(k)(h)
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluate both sides of the cumulant expansion truncated at order `l`.
pub fn cumulant_expansion_check(
    law: ScalarLaw,
    f: SmoothFn,
    l: u32,
) -> Result<ExpansionCheck> {
    if l > 7 {
        return Err(Error::config(
            "cumulant_expansion_check: order above the supplied cumulants (l <= 7)",
        ));
    }
    if l >= f.max_order() {
        return Err(Error::config(
            "cumulant_expansion_check: derivative order beyond the supplied derivatives",
        ));
    }
    let lhs = law.expect(&|x| f.derivative(0, x) * x)?;
    let cumulants = law.cumulants(l as usize + 1);
    let mut rhs = crate::sum::KahanSum::new();
    let mut k_factorial = 1.0f64;
    for k in 0..=l {
        if k > 0 {
            k_factorial *= k as f64;
        }
        let e_fk = law.expect(&|x| f.derivative(k, x))?;
        rhs.add(cumulants[k as usize] / k_factorial * e_fk);
    }
    let rhs = rhs.value();
    Ok(ExpansionCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}
