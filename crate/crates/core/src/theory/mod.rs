//! Closed-form and quadrature-based predictors: semicircle quantities, the
//! limiting covariance kernels, centring integrals, and rate exponents.

pub mod testfn;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

pub use testfn::TestFunction;

/// Spectral window eta = N^{-alpha} around a bulk energy E.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MesoscopicScale {
    pub alpha: f64,
    pub energy: f64,
}

impl MesoscopicScale {
    pub fn new(alpha: f64, energy: f64) -> Result<Self> {
        let s = Self { alpha, energy };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!(
                "alpha: must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.energy.abs() < 2.0) {
            return Err(Error::config(format!(
                "energy: must lie in (-2, 2), got {}",
                self.energy
            )));
        }
        Ok(())
    }

    pub fn eta(&self, n: usize) -> f64 {
        (n as f64).powf(-self.alpha)
    }

    /// Distance to the spectral edge, kappa = 2 - |E|.
    pub fn kappa(&self) -> f64 {
        2.0 - self.energy.abs()
    }
}

/// Semicircle density rho(x) = sqrt((4 - x^2)_+) / (2 pi).
pub fn semicircle_density(x: f64) -> f64 {
    let t = 4.0 - x * x;
    if t <= 0.0 {
        0.0
    } else {
        t.sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// Antiderivative of the semicircle density, clamped to [0, 1].
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    let pi = std::f64::consts::PI;
    let v = 0.5 + x * (4.0 - x * x).sqrt() / (4.0 * pi) + (x / 2.0).asin() / pi;
    v.clamp(0.0, 1.0)
}

/// Stieltjes transform of the semicircle law: the root of m^2 + z m + 1 = 0
/// with Im m(z) Im z > 0.
pub fn stieltjes_m(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::domain("stieltjes_m: Im z must be nonzero"));
    }
    let disc = (z * z - 4.0).sqrt();
    // Larger-magnitude quadratic root, then the partner via the product
    // of roots (= 1), which avoids cancellation.
    let big = if (z.conj() * disc).re >= 0.0 {
        -(z + disc) / 2.0
    } else {
        -(z - disc) / 2.0
    };
    let candidates = [big, big.inv()];
    for m in candidates {
        if m.im * z.im > 0.0 {
            let residual = (m + m.inv() + z).norm();
            if residual > 1e-12 {
                return Err(Error::numerical(format!(
                    "stieltjes_m residual {residual:.3e} exceeds 1e-12 at z = {z}"
                )));
            }
            return Ok(m);
        }
    }
    Err(Error::numerical(format!(
        "stieltjes_m: no root satisfies the Herglotz sign condition at z = {z}"
    )))
}

/// Covariance kernel of the limiting resolvent process:
/// (E Y(b1) conj(Y(b2)), E Y(b1) Y(b2)) = (-2/(b1 - conj(b2))^2, 0).
pub fn resolvent_covariance(b1: Complex64, b2: Complex64) -> Result<(Complex64, Complex64)> {
    if !(b1.im > 0.0 && b2.im > 0.0) {
        return Err(Error::domain(
            "resolvent_covariance: both arguments must lie in the upper half-plane",
        ));
    }
    let d = b1 - b2.conj();
    Ok((-2.0 / (d * d), Complex64::new(0.0, 0.0)))
}

/// Difference quotient (f(x) - f(x-u))/u with the removable singularity at
/// u = 0 resolved through the midpoint derivative.
#[inline]
fn quotient(f: &TestFunction, x: f64, u: f64) -> f64 {
    if u.abs() < 1e-5 {
        f.deriv(x - 0.5 * u)
    } else {
        (f.eval(x) - f.eval(x - u)) / u
    }
}

/// H^{1/2} covariance form
/// (1/2 pi^2) int int (f1(x)-f1(y)) (f2(x)-f2(y)) / (x-y)^2 dx dy
/// by adaptive quadrature in the (x, u = x - y) coordinates.
pub fn h_half_covariance(f1: &TestFunction, f2: &TestFunction) -> Result<f64> {
    h_half_covariance_tol(f1, f2, 1e-8)
}

pub fn h_half_covariance_tol(f1: &TestFunction, f2: &TestFunction, tol: f64) -> Result<f64> {
    // After integrating over x the u-integrand is even, so integrate over
    // u > 0 and double; with the 1/(2 pi^2) prefactor this leaves 1/pi^2.
    //
    // The inner tolerance must shrink like 1/(1 + u^2): the outer tan
    // substitution multiplies each inner value by exactly that factor, so a
    // flat inner tolerance would blow up in the tail.
    let j_tol = tol * std::f64::consts::PI;
    let outer = |u: f64| {
        let center = 0.5 * u;
        let scale = (0.5 * u).max(1.0);
        // The integrand has unit-width features near x = 0 and x = u;
        // geometric breakpoints around both keep the needle visible after
        // the tan map even when u is huge.
        let mut breaks = vec![0.0, u, 0.5 * u];
        for k in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            breaks.extend_from_slice(&[k, -k, u + k, u - k]);
        }
        let inner_tol = j_tol / (1.0 + u * u) / 8.0;
        quad::integrate_line(
            &|x| quotient(f1, x, u) * quotient(f2, x, u),
            center,
            scale,
            &breaks,
            inner_tol,
        )
        .unwrap_or(f64::NAN)
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let g = |t: f64| {
        let tan = t.tan();
        outer(tan) * (1.0 + tan * tan)
    };
    let j = quad::integrate_segments(&g, &[0.0, 0.3, 0.8, 1.2, half_pi], j_tol)?;
    let value = j / (std::f64::consts::PI * std::f64::consts::PI);
    if !value.is_finite() {
        return Err(Error::numerical(
            "h_half_covariance: inner quadrature failed to converge",
        ));
    }
    Ok(value)
}

/// H^{1/2} variance through the Fourier side,
/// (1/pi) int |xi| |fhat(xi)|^2 dxi.
/// Uses the closed-form transform when available; otherwise a trapezoidal
/// discrete transform on [-L, L] with 2^20 points, with aliasing estimated
/// by doubling L.
pub fn h_half_variance_fourier(f: &TestFunction) -> Result<f64> {
    if f.has_fourier() {
        let v = quad::integrate_line(
            &|xi| {
                if xi <= 0.0 {
                    0.0
                } else {
                    let a = f.fourier_transform(xi).expect("checked");
                    xi * a * a
                }
            },
            0.0,
            1.0,
            &[0.0, 1.0, 2.0],
            1e-10,
        )?;
        return Ok(2.0 * v / std::f64::consts::PI);
    }
    let coarse = grid_h_half(f, 2.0e3, 1 << 20);
    let fine = grid_h_half(f, 4.0e3, 1 << 21);
    if (coarse - fine).abs() > 1e-6 {
        return Err(Error::numerical(format!(
            "discrete transform aliasing above tolerance: {coarse} vs {fine} under domain doubling"
        )));
    }
    Ok(fine)
}

/// Trapezoidal transform of f on [-l, l) with m points, then the weighted
/// Plancherel sum (1/pi) sum |xi_k| |fhat(xi_k)|^2 dxi.
fn grid_h_half(f: &TestFunction, l: f64, m: usize) -> f64 {
    use rustfft::num_complex::Complex as FftComplex;
    use rustfft::FftPlanner;

    let dx = 2.0 * l / m as f64;
    let mut buf: Vec<FftComplex<f64>> = (0..m)
        .map(|j| FftComplex::new(f.eval(-l + j as f64 * dx), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    // |fhat(xi_k)|^2 = dx^2/(2 pi) |X_k|^2 at xi_k = 2 pi k / (m dx),
    // k interpreted symmetrically around zero.
    let dxi = 2.0 * std::f64::consts::PI / (m as f64 * dx);
    let factor = dx * dx / (2.0 * std::f64::consts::PI);
    let mut acc = crate::sum::KahanSum::new();
    for (k, v) in buf.iter().enumerate() {
        let freq_index = if k <= m / 2 {
            k as f64
        } else {
            k as f64 - m as f64
        };
        let xi = freq_index * dxi;
        acc.add(xi.abs() * factor * v.norm_sqr());
    }
    acc.value() * dxi / std::f64::consts::PI
}

/// Centring integral N int_{-2}^{2} rho(x) f((x - E)/eta) dx.
///
/// The substitution x = 2 sin t removes the edge square-root singularity;
/// breakpoints around E at scales eta * 4^j steer the refinement into the
/// window where f varies.
pub fn centering_integral(f: &TestFunction, energy: f64, eta: f64, n: usize) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::domain("centering_integral: eta must be positive"));
    }
    if !(energy.abs() < 2.0) {
        return Err(Error::domain(
            "centering_integral: energy must lie in (-2, 2)",
        ));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut pts = vec![-half_pi, 0.0, half_pi, (energy / 2.0).asin()];
    for j in 0..=14 {
        let w = eta * 4f64.powi(j);
        for x in [energy - w, energy + w] {
            if x.abs() < 2.0 {
                pts.push((x / 2.0).asin());
            }
        }
    }
    pts.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    pts.dedup();
    let integrand = |t: f64| {
        let (s, c) = t.sin_cos();
        (2.0 / std::f64::consts::PI) * c * c * f.eval((2.0 * s - energy) / eta)
    };
    let unit = quad::integrate_segments(&integrand, &pts, 1e-13 + 1e-10 * eta)?;
    Ok(n as f64 * unit)
}

/// Rate exponent c0(alpha) = min(alpha, 1 - alpha) / 3.
pub fn rate_c0(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "rate_c0: alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(alpha.min(1.0 - alpha) / 3.0)
}

/// Leading term of E <conj Gbar>^n <Gbar>^m:
/// n!/2^n N^{2n(alpha-1)} when m = n, zero otherwise.
pub fn predicted_mixed_moment(n: u32, m: u32, alpha: f64, dimension: usize) -> f64 {
    assert!(n + m >= 2, "mixed moments need n + m >= 2");
    if n != m {
        return 0.0;
    }
    let mut factorial = 1.0f64;
    for k in 2..=n {
        factorial *= k as f64;
    }
    factorial / 2f64.powi(n as i32) * (dimension as f64).powf(2.0 * n as f64 * (alpha - 1.0))
}
