//! Numerical Helffer-Sjostrand functional calculus.
//!
//! Reconstructs f(lambda) and Tr f_eta(H) from two-dimensional integrals of
//! the resolvent against an almost analytic extension of f, cross-checking
//! the representation that the resolvent pipeline rests on.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;
use crate::spectral::Spectrum;
use crate::sum::KahanSumC;
use crate::theory::TestFunction;

/// Fixed smooth bump: 1 on [-1, 1], exp(1 - 1/(1 - (|y|-1)^2)) on
/// 1 < |y| < 2, 0 beyond.
#[derive(Debug, Clone, Copy, Default)]
pub struct CutoffFunction;

impl CutoffFunction {
    #[inline]
    pub fn eval(self, y: f64) -> f64 {
        let a = y.abs();
        if a <= 1.0 {
            1.0
        } else if a >= 2.0 {
            0.0
        } else {
            let t = a - 1.0;
            (1.0 - 1.0 / (1.0 - t * t)).exp()
        }
    }

    #[inline]
    pub fn deriv(self, y: f64) -> f64 {
        let a = y.abs();
        if a <= 1.0 || a >= 2.0 {
            0.0
        } else {
            let t = a - 1.0;
            let d = 1.0 - t * t;
            let chi = (1.0 - 1.0 / d).exp();
            let g = -2.0 * t / (d * d);
            y.signum() * chi * g
        }
    }
}

/// Which almost analytic extension to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionVariant {
    /// f(x) + i (f(x+y) - f(x)); needs only f in C^1.
    FirstOrder,
    /// f(x) + i y f'(x); needs f in C^2.
    DerivativeForm,
}

/// Almost analytic extension of a test function, together with the cutoff
/// scaling chi(y / cutoff_scale).
#[derive(Debug, Clone)]
pub struct AlmostAnalyticExtension {
    pub variant: ExtensionVariant,
    pub f: TestFunction,
    pub cutoff_scale: f64,
}

impl AlmostAnalyticExtension {
    pub fn new(variant: ExtensionVariant, f: TestFunction, cutoff_scale: f64) -> Result<Self> {
        if !(cutoff_scale > 0.0) {
            return Err(Error::config("cutoff_scale: must be > 0"));
        }
        if variant == ExtensionVariant::DerivativeForm && !f.is_c2() {
            return Err(Error::config(format!(
                "derivative_form extension requires a C^2 function; '{}' provides no second derivative",
                f.label()
            )));
        }
        Ok(Self {
            variant,
            f,
            cutoff_scale,
        })
    }

    /// Extension value; equals f on the real axis for both variants.
    pub fn value(&self, z: Complex64) -> Complex64 {
        let (x, y) = (z.re, z.im);
        match self.variant {
            ExtensionVariant::FirstOrder => Complex64::new(
                self.f.eval(x),
                self.f.eval(x + y) - self.f.eval(x),
            ),
            ExtensionVariant::DerivativeForm => {
                Complex64::new(self.f.eval(x), y * self.f.deriv(x))
            }
        }
    }

    /// dbar of (extension * cutoff) at z, the weight entering the integral
    /// representation.
    pub fn dbar(&self, z: Complex64) -> Complex64 {
        let (x, y) = (z.re, z.im);
        let c = self.cutoff_scale;
        let chi = CutoffFunction.eval(y / c);
        let dchi = CutoffFunction.deriv(y / c) / c;
        match self.variant {
            ExtensionVariant::FirstOrder => {
                let df = self.f.deriv(x + y) - self.f.deriv(x);
                let dfv = self.f.eval(x + y) - self.f.eval(x);
                let fv = self.f.eval(x);
                // (1/2)[(i-1) df chi + (i f - dfv) dchi]
                0.5 * (Complex64::new(-df, df) * chi
                    + Complex64::new(-dfv, fv) * dchi)
            }
            ExtensionVariant::DerivativeForm => {
                let d2 = self.f.second_deriv(x).expect("validated C^2");
                // (i/2)[y f'' chi + (f + i y f') dchi]
                let inner = Complex64::new(y * d2 * chi, 0.0)
                    + Complex64::new(self.f.eval(x), y * self.f.deriv(x)) * dchi;
                Complex64::new(0.0, 0.5) * inner
            }
        }
    }
}

/// Dyadic strip boundaries in y for the outer integral: the integrand
/// concentrates near y = 0 and near the cutoff transition.
fn strip_breakpoints(scale: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    for j in -40..=1 {
        let y = scale * 2f64.powi(j);
        pts.push(y);
        pts.push(-y);
    }
    pts.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
    pts
}

/// Reconstruct f(lambda) = (1/pi) int dbar(f chi)(z) / (lambda - z) d^2 z by
/// adaptive quadrature over the cutoff support.
pub fn hs_reconstruct_scalar(
    ext: &AlmostAnalyticExtension,
    lambda: f64,
    quad_tol: f64,
) -> Result<f64> {
    if !(quad_tol > 0.0) {
        return Err(Error::config("quad_tol: must be > 0"));
    }
    let c = ext.cutoff_scale;
    let inner_tol = quad_tol / (16.0 * 4.0 * c);
    let line = |y: f64, take_im: bool| -> f64 {
        quad::integrate_line(
            &|x| {
                let z = Complex64::new(x, y);
                let v = ext.dbar(z) / (lambda - z);
                if take_im {
                    v.im
                } else {
                    v.re
                }
            },
            lambda,
            1.0,
            &[
                lambda - 8.0 * y.abs(),
                lambda - y.abs(),
                lambda + y.abs(),
                lambda + 8.0 * y.abs(),
                0.0,
            ],
            inner_tol,
        )
        .unwrap_or(f64::NAN)
    };
    let pts = strip_breakpoints(c);
    let real_part = quad::integrate_segments(&|y| line(y, false), &pts, quad_tol / 2.0)?;
    let imag_part = quad::integrate_segments(&|y| line(y, true), &pts, quad_tol / 2.0)?;
    if !(real_part.is_finite() && imag_part.is_finite()) {
        return Err(Error::numerical(
            "hs_reconstruct_scalar: inner quadrature failed",
        ));
    }
    let value = real_part / std::f64::consts::PI;
    let residual_imag = imag_part / std::f64::consts::PI;
    if residual_imag.abs() > 10.0 * quad_tol {
        return Err(Error::numerical(format!(
            "hs_reconstruct_scalar: imaginary residue {residual_imag:.3e} above tolerance"
        )));
    }
    Ok(value)
}

/// Integrand weight of the trace representation (the three-term form built
/// from the first-order extension):
/// (1/2 pi)[(i-1)(f'_eta(x+y) - f'_eta(x)) chi(y/sigma)
///          - (f_eta(x+y) - f_eta(x)) chi'(y/sigma)/sigma
///          + i f_eta(x) chi'(y/sigma)/sigma].
pub fn varphi_f(
    z: Complex64,
    f: &TestFunction,
    energy: f64,
    eta: f64,
    sigma: f64,
) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let chi = CutoffFunction.eval(y / sigma);
    let dchi = CutoffFunction.deriv(y / sigma) / sigma;
    let f_at = |t: f64| f.eval((t - energy) / eta);
    let df_at = |t: f64| f.deriv((t - energy) / eta) / eta;
    let d_deriv = df_at(x + y) - df_at(x);
    let d_val = f_at(x + y) - f_at(x);
    let val = f_at(x);
    (Complex64::new(-d_deriv, d_deriv) * chi
        + Complex64::new(-d_val, val) * dchi)
        / (2.0 * std::f64::consts::PI)
}

/// Derivative-form analogue of `varphi_f`, available for C^2 functions.
fn varphi_derivative_form(
    z: Complex64,
    f: &TestFunction,
    energy: f64,
    eta: f64,
    sigma: f64,
) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let chi = CutoffFunction.eval(y / sigma);
    let dchi = CutoffFunction.deriv(y / sigma) / sigma;
    let u = (x - energy) / eta;
    let d2 = f.second_deriv(u).expect("validated C^2") / (eta * eta);
    let inner =
        Complex64::new(y * d2 * chi, 0.0) + Complex64::new(f.eval(u), y * f.deriv(u) / eta) * dchi;
    Complex64::new(0.0, 0.5) * inner / std::f64::consts::PI
}

/// `hs_trace` on a raw matrix sample: decomposes first, then evaluates the
/// trace representation on the spectrum.
#[allow(clippy::too_many_arguments)]
pub fn hs_trace_sample(
    sample: &crate::ensemble::MatrixSample,
    f: &TestFunction,
    energy: f64,
    eta: f64,
    sigma: f64,
    quad_tol: f64,
    variant: ExtensionVariant,
) -> Result<f64> {
    let spectrum = crate::spectral::eigenvalues(sample, 1e-10)?;
    hs_trace(&spectrum, f, energy, eta, sigma, quad_tol, variant)
}

/// Tr f((H - E)/eta) evaluated through the resolvent representation
/// Tr f_eta(H) = int varphi(z) Tr G(z) d^2 z, with Tr G summed over the
/// spectrum. Agrees with the eigenvalue sum to quad_tol.
pub fn hs_trace(
    spectrum: &Spectrum,
    f: &TestFunction,
    energy: f64,
    eta: f64,
    sigma: f64,
    quad_tol: f64,
    variant: ExtensionVariant,
) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::domain("hs_trace: eta must be positive"));
    }
    if !(sigma > 0.0 && sigma <= eta) {
        return Err(Error::domain("hs_trace: need 0 < sigma <= eta"));
    }
    if variant == ExtensionVariant::DerivativeForm && !f.is_c2() {
        return Err(Error::config(
            "hs_trace: derivative_form requires a C^2 test function",
        ));
    }
    let eigenvalues = spectrum.eigenvalues();

    let trace_g = |z: Complex64| -> Complex64 {
        let mut acc = KahanSumC::new();
        for &l in eigenvalues {
            acc.add((Complex64::new(l, 0.0) - z).inv());
        }
        acc.value()
    };
    let phi = |z: Complex64| -> Complex64 {
        match variant {
            ExtensionVariant::FirstOrder => varphi_f(z, f, energy, eta, sigma),
            ExtensionVariant::DerivativeForm => varphi_derivative_form(z, f, energy, eta, sigma),
        }
    };

    let mut x_breaks: Vec<f64> = eigenvalues.to_vec();
    for k in [-8.0, -4.0, -1.0, 0.0, 1.0, 4.0, 8.0] {
        x_breaks.push(energy + k * eta);
    }
    let inner_tol = quad_tol / (16.0 * 4.0 * sigma);
    let line = |y: f64, take_im: bool| -> f64 {
        quad::integrate_line(
            &|x| {
                let z = Complex64::new(x, y);
                let v = phi(z) * trace_g(z);
                if take_im {
                    v.im
                } else {
                    v.re
                }
            },
            energy,
            eta,
            &x_breaks,
            inner_tol,
        )
        .unwrap_or(f64::NAN)
    };

    let pts = strip_breakpoints(sigma);
    let real_part = quad::integrate_segments(&|y| line(y, false), &pts, quad_tol / 2.0)?;
    let imag_part = quad::integrate_segments(&|y| line(y, true), &pts, quad_tol / 2.0)?;
    if !(real_part.is_finite() && imag_part.is_finite()) {
        return Err(Error::numerical("hs_trace: inner quadrature failed"));
    }
    if imag_part.abs() > 10.0 * quad_tol {
        return Err(Error::numerical(format!(
            "hs_trace: imaginary residue {imag_part:.3e} above tolerance"
        )));
    }
    Ok(real_part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Provenance;

    fn spectrum_of(eigs: &[f64]) -> Spectrum {
        Spectrum::from_eigenvalues(
            eigs.to_vec(),
            Provenance {
                master_seed: 0,
                sample_index: 0,
            },
        )
    }

    #[test]
    fn cutoff_shape() {
        let chi = CutoffFunction;
        assert_eq!(chi.eval(0.0), 1.0);
        assert_eq!(chi.eval(0.99), 1.0);
        assert_eq!(chi.eval(2.0), 0.0);
        assert_eq!(chi.eval(-2.5), 0.0);
        assert!(chi.eval(1.5) > 0.0 && chi.eval(1.5) < 1.0);
        assert_eq!(chi.deriv(0.0), 0.0);
        assert_eq!(chi.deriv(0.5), 0.0);
        assert!(chi.deriv(1.5) < 0.0);
        assert!(chi.deriv(-1.5) > 0.0);
        // Smooth vanishing at the transition edges.
        assert!(chi.eval(1.0 + 1e-9) > 1.0 - 1e-6);
        assert!(chi.eval(2.0 - 1e-6) < 1e-6);
    }

    #[test]
    fn extensions_agree_with_f_on_the_real_axis() {
        let f = TestFunction::cauchy();
        for variant in [ExtensionVariant::FirstOrder, ExtensionVariant::DerivativeForm] {
            let ext = AlmostAnalyticExtension::new(variant, f.clone(), 1.0).unwrap();
            for x in [-2.0, -0.3, 0.0, 1.7] {
                let v = ext.value(Complex64::new(x, 0.0));
                assert!((v.re - f.eval(x)).abs() < 1e-15);
                assert_eq!(v.im, 0.0);
            }
        }
    }

    #[test]
    fn first_order_extension_is_almost_analytic() {
        // dbar(f tilde) = O(|y|) near the real axis (check without the
        // cutoff factor by staying inside |y| <= cutoff_scale).
        let f = TestFunction::gauss();
        let ext = AlmostAnalyticExtension::new(ExtensionVariant::FirstOrder, f, 1.0).unwrap();
        for x in [-1.2, 0.0, 0.8] {
            for y in [1e-3, 1e-4, 1e-5] {
                let d = ext.dbar(Complex64::new(x, y)).norm();
                assert!(d <= 5.0 * y, "dbar {d} at y {y}");
            }
        }
    }

    #[test]
    fn derivative_form_requires_c2() {
        let f = TestFunction::new("c1_only", |x| x.exp().min(1.0), |_| 0.0, 0.5, 1.0);
        assert!(AlmostAnalyticExtension::new(ExtensionVariant::DerivativeForm, f, 1.0).is_err());
    }

    #[test]
    fn reconstructs_cauchy_pointwise() {
        let f = TestFunction::cauchy();
        let tol = 1e-6;
        for variant in [ExtensionVariant::FirstOrder, ExtensionVariant::DerivativeForm] {
            let ext = AlmostAnalyticExtension::new(variant, f.clone(), 1.0).unwrap();
            for lambda in [0.0, 1.0, 10.0] {
                let v = hs_reconstruct_scalar(&ext, lambda, tol).unwrap();
                let expect = f.eval(lambda);
                assert!(
                    (v - expect).abs() <= tol,
                    "{variant:?} at {lambda}: {v} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn varphi_support_and_zeros() {
        let f = TestFunction::cauchy();
        let (energy, eta, sigma) = (0.1, 0.25, 0.0625);
        // Vanishes exactly off the cutoff support.
        for y in [2.0 * sigma, -2.0 * sigma, 3.0 * sigma, 0.5] {
            let v = varphi_f(Complex64::new(0.2, y), &f, energy, eta, sigma);
            assert_eq!(v, Complex64::new(0.0, 0.0), "y = {y}");
        }
        // Vanishes on the real axis.
        let v = varphi_f(Complex64::new(0.3, 0.0), &f, energy, eta, sigma);
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn varphi_is_linear_in_f() {
        let f1 = TestFunction::cauchy();
        let f2 = TestFunction::gauss();
        let sum = TestFunction::new(
            "sum",
            |x| 1.0 / (1.0 + x * x) + (-0.5 * x * x).exp(),
            |x| {
                let d = 1.0 + x * x;
                -2.0 * x / (d * d) - x * (-0.5 * x * x).exp()
            },
            1.0,
            1.0,
        );
        let (energy, eta, sigma) = (0.0, 0.5, 0.125);
        for &(x, y) in &[(0.3, 0.05), (-0.7, -0.11), (0.0, 0.2)] {
            let z = Complex64::new(x, y);
            let lhs = varphi_f(z, &sum, energy, eta, sigma);
            let rhs = varphi_f(z, &f1, energy, eta, sigma) + varphi_f(z, &f2, energy, eta, sigma);
            assert!((lhs - rhs).norm() < 1e-14, "at {z}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn trace_of_zero_matrix_is_n_f_of_shifted_origin() {
        let n = 8;
        let spectrum = spectrum_of(&vec![0.0; n]);
        let f = TestFunction::cauchy();
        let (energy, eta) = (0.3, 0.25);
        let expect = n as f64 * f.eval(-energy / eta);
        let v = hs_trace(
            &spectrum,
            &f,
            energy,
            eta,
            eta / 4.0,
            1e-6,
            ExtensionVariant::FirstOrder,
        )
        .unwrap();
        assert!((v - expect).abs() < 1e-6, "{v} vs {expect}");
    }

    #[test]
    fn trace_matches_eigen_sum_and_is_sigma_stable() {
        let spectrum = spectrum_of(&[-1.4, -0.9, -0.2, 0.05, 0.3, 0.31, 0.9, 1.8]);
        let f = TestFunction::cauchy();
        let (energy, eta) = (0.1, 0.25);
        let direct: f64 = spectrum
            .eigenvalues()
            .iter()
            .map(|&l| f.eval((l - energy) / eta))
            .sum();
        let tol = 1e-6;
        let a = hs_trace(
            &spectrum,
            &f,
            energy,
            eta,
            eta / 4.0,
            tol,
            ExtensionVariant::FirstOrder,
        )
        .unwrap();
        assert!((a - direct).abs() <= tol, "{a} vs {direct}");
        let b = hs_trace(
            &spectrum,
            &f,
            energy,
            eta,
            eta / 8.0,
            tol,
            ExtensionVariant::FirstOrder,
        )
        .unwrap();
        assert!((a - b).abs() <= 2.0 * tol, "sigma halving moved {a} to {b}");
        let c = hs_trace(
            &spectrum,
            &f,
            energy,
            eta,
            eta / 4.0,
            tol,
            ExtensionVariant::DerivativeForm,
        )
        .unwrap();
        assert!((c - direct).abs() <= tol, "derivative form {c} vs {direct}");
    }

    #[test]
    fn hs_trace_validates_sigma() {
        let spectrum = spectrum_of(&[0.0, 1.0]);
        let f = TestFunction::cauchy();
        assert!(hs_trace(&spectrum, &f, 0.0, 0.25, 0.5, 1e-6, ExtensionVariant::FirstOrder).is_err());
        assert!(hs_trace(&spectrum, &f, 0.0, 0.25, 0.0, 1e-6, ExtensionVariant::FirstOrder).is_err());
    }
}
