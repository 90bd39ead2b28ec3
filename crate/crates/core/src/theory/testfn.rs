//! Test functions for linear eigenvalue statistics.
//!
//! Elements of the class C^{1,r,s}: continuously differentiable, f' Hoelder
//! continuous of order r, and |f(x)| + |f'(x)| = O((1+|x|)^{-1-s}). The
//! built-in catalog spans smooth/rough and fast/slow decay; nothing in the
//! pipeline depends on a specific choice.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A test function together with its derivative and decay metadata.
#[derive(Clone)]
pub struct TestFunction {
    label: String,
    f: RealFn,
    df: RealFn,
    d2f: Option<RealFn>,
    hoelder_r: f64,
    decay_s: f64,
    /// Modulus of the Fourier transform under the unitary convention
    /// fhat(xi) = (2 pi)^{-1/2} int f(x) e^{-i xi x} dx. For the even
    /// catalog members this coincides with fhat itself; only |fhat| enters
    /// any computation here.
    fourier: Option<RealFn>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, g: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        g.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("hoelder_r", &self.hoelder_r)
            .field("decay_s", &self.decay_s)
            .field("has_c2", &self.d2f.is_some())
            .field("has_fourier", &self.fourier.is_some())
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        hoelder_r: f64,
        decay_s: f64,
    ) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            df: Arc::new(df),
            d2f: None,
            hoelder_r,
            decay_s,
            fourier: None,
        }
    }

    pub fn with_second_derivative(
        mut self,
        d2f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.d2f = Some(Arc::new(d2f));
        self
    }

    pub fn with_fourier(mut self, fhat: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.fourier = Some(Arc::new(fhat));
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    #[inline]
    pub fn deriv(&self, x: f64) -> f64 {
        (self.df)(x)
    }

    /// Second derivative, present when the function is C^2.
    pub fn second_deriv(&self, x: f64) -> Option<f64> {
        self.d2f.as_ref().map(|d| d(x))
    }

    pub fn is_c2(&self) -> bool {
        self.d2f.is_some()
    }

    /// |fhat(xi)| in closed form, when available.
    pub fn fourier_transform(&self, xi: f64) -> Option<f64> {
        self.fourier.as_ref().map(|h| h(xi))
    }

    pub fn has_fourier(&self) -> bool {
        self.fourier.is_some()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hoelder_r(&self) -> f64 {
        self.hoelder_r
    }

    pub fn decay_s(&self) -> f64 {
        self.decay_s
    }

    /// Dilated function x -> f(lambda x). The H^{1/2} seminorm is invariant
    /// under this map.
    pub fn dilate(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        let f = self.f.clone();
        let df = self.df.clone();
        let d2f = self.d2f.clone();
        let fourier = self.fourier.clone();
        Self {
            label: format!("{}_dilated_{lambda}", self.label),
            f: Arc::new(move |x| f(lambda * x)),
            df: {
                let df = df.clone();
                Arc::new(move |x| lambda * df(lambda * x))
            },
            d2f: d2f.map(|d| {
                let d = d.clone();
                let l = lambda;
                Arc::new(move |x: f64| l * l * d(l * x)) as RealFn
            }),
            hoelder_r: self.hoelder_r,
            decay_s: self.decay_s,
            fourier: fourier.map(|h| {
                let h = h.clone();
                let l = lambda;
                Arc::new(move |xi: f64| h(xi / l) / l) as RealFn
            }),
        }
    }

    /// Pointwise negation; the covariance form is bilinear, so this flips
    /// the sign of every Z(f) sample.
    pub fn negate(&self) -> Self {
        let f = self.f.clone();
        let df = self.df.clone();
        let d2f = self.d2f.clone();
        let fourier = self.fourier.clone();
        Self {
            label: format!("neg_{}", self.label),
            f: Arc::new(move |x| -f(x)),
            df: {
                let df = df.clone();
                Arc::new(move |x| -df(x))
            },
            d2f: d2f.map(|d| {
                let d = d.clone();
                Arc::new(move |x: f64| -d(x)) as RealFn
            }),
            hoelder_r: self.hoelder_r,
            decay_s: self.decay_s,
            fourier,
        }
    }

    /// The zero function (degenerate member; variance 0).
    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0, |_| 0.0, 1.0, 1.0)
            .with_second_derivative(|_| 0.0)
            .with_fourier(|_| 0.0)
    }

    /// cauchy(x) = 1/(1+x^2); fhat(xi) = sqrt(pi/2) e^{-|xi|}.
    pub fn cauchy() -> Self {
        Self::new(
            "cauchy",
            |x| 1.0 / (1.0 + x * x),
            |x| {
                let d = 1.0 + x * x;
                -2.0 * x / (d * d)
            },
            1.0,
            1.0,
        )
        .with_second_derivative(|x| {
            let d = 1.0 + x * x;
            (6.0 * x * x - 2.0) / (d * d * d)
        })
        .with_fourier(|xi| (std::f64::consts::FRAC_PI_2).sqrt() * (-xi.abs()).exp())
    }

    /// gauss(x) = e^{-x^2/2}; fhat(xi) = e^{-xi^2/2}.
    pub fn gauss() -> Self {
        Self::new(
            "gauss",
            |x| (-0.5 * x * x).exp(),
            |x| -x * (-0.5 * x * x).exp(),
            1.0,
            2.0,
        )
        .with_second_derivative(|x| (x * x - 1.0) * (-0.5 * x * x).exp())
        .with_fourier(|xi| (-0.5 * xi * xi).exp())
    }

    /// poly_decay(x) = (1+x^2)^{-3/4}: slow decay (s = 1/2), exercises the
    /// discrete-transform fallback since fhat has no elementary closed form.
    pub fn poly_decay() -> Self {
        Self::new(
            "poly_decay",
            |x| (1.0 + x * x).powf(-0.75),
            |x| -1.5 * x * (1.0 + x * x).powf(-1.75),
            1.0,
            0.5,
        )
        .with_second_derivative(|x| (1.0 + x * x).powf(-2.75) * (1.5 * (2.5 * x * x - 1.0)))
    }

    /// wiggle(x) = sin(x)/(1+x^2): signed, with
    /// |fhat(xi)| = sqrt(pi/2) |e^{-|xi-1|} - e^{-|xi+1|}| / 2.
    pub fn wiggle() -> Self {
        Self::new(
            "wiggle",
            |x| x.sin() / (1.0 + x * x),
            |x| {
                let g = 1.0 / (1.0 + x * x);
                x.cos() * g - 2.0 * x * x.sin() * g * g
            },
            1.0,
            1.0,
        )
        .with_second_derivative(|x| {
            let g = 1.0 / (1.0 + x * x);
            let (s, c) = x.sin_cos();
            -s * g - 4.0 * x * c * g * g - 2.0 * s * g * g + 8.0 * x * x * s * g * g * g
        })
        .with_fourier(|xi| {
            0.5 * (std::f64::consts::FRAC_PI_2).sqrt()
                * ((-(xi - 1.0).abs()).exp() - (-(xi + 1.0).abs()).exp()).abs()
        })
    }

    /// The built-in catalog.
    pub fn catalog() -> Vec<Self> {
        vec![
            Self::cauchy(),
            Self::gauss(),
            Self::poly_decay(),
            Self::wiggle(),
        ]
    }

    /// Look up a catalog member by label.
    pub fn by_label(label: &str) -> Result<Self> {
        match label {
            "cauchy" => Ok(Self::cauchy()),
            "gauss" => Ok(Self::gauss()),
            "poly_decay" => Ok(Self::poly_decay()),
            "wiggle" => Ok(Self::wiggle()),
            "zero" => Ok(Self::zero()),
            other => Err(Error::config(format!(
                "unknown test function '{other}' (catalog: cauchy, gauss, poly_decay, wiggle, zero)"
            ))),
        }
    }

    /// Numerical sanity checks of the class membership: decay of |f| + |f'|
    /// on a grid |x| <= 1e3, and the Plancherel identity when a closed-form
    /// transform is present.
    pub fn validate(&self) -> Result<()> {
        let mut worst = 0.0f64;
        let mut x: f64 = -1000.0;
        while x <= 1000.0 {
            let weight = (1.0 + x.abs()).powf(1.0 + self.decay_s);
            worst = worst.max((self.eval(x).abs() + self.deriv(x).abs()) * weight);
            x += 0.9173; // incommensurate step, avoids hitting only zeros
        }
        if !worst.is_finite() || worst > 1e6 {
            return Err(Error::config(format!(
                "test function '{}' violates the (1+|x|)^(-1-s) decay bound: C = {worst:.3e}",
                self.label
            )));
        }
        if self.has_fourier() {
            let f2 = quad::integrate_line(&|x| self.eval(x).powi(2), 0.0, 1.0, &[], 1e-10)?;
            let fhat2 = quad::integrate_line(
                &|xi| self.fourier_transform(xi).unwrap_or(0.0).powi(2),
                0.0,
                1.0,
                &[-1.0, 0.0, 1.0],
                1e-10,
            )?;
            if (f2 - fhat2).abs() > 1e-7 * (1.0 + f2.abs()) {
                return Err(Error::numerical(format!(
                    "Plancherel check failed for '{}': int f^2 = {f2}, int fhat^2 = {fhat2}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}
