//! Wigner matrix ensembles.
//!
//! A Wigner matrix here is a Hermitian N x N matrix with independent
//! upper-triangular entries, mean zero, off-diagonal variance 1/N and
//! diagonal variance `diagonal_variance / N`. In the complex Hermitian
//! class the off-diagonal entries additionally satisfy E H_ij^2 = 0, which
//! the sampler enforces by drawing independent real and imaginary parts of
//! equal variance 1/(2N).
//!
//! Sampling is a pure function of `(spec, sample_index)`: entry (i, j) is
//! generated from a private counter block of a ChaCha stream keyed by
//! `(master_seed, sample_index)`, so matrices are bit-identical no matter
//! how samples are scheduled across workers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{CounterStream, EntryDraws};
use crate::stats::accum::batch_mean_se;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    RealSymmetric,
    ComplexHermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryLaw {
    Gaussian,
    Rademacher,
    Uniform,
    HeavyTail,
}

/// Description of a Wigner ensemble, including how to reproduce its draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub symmetry_class: SymmetryClass,
    pub entry_law: EntryLaw,
    /// Matrix dimension N.
    pub dimension: usize,
    /// zeta = Var(sqrt(N) H_ii). Defaults: 2 in the real class (GOE
    /// convention), 1 in the complex class.
    pub diagonal_variance: f64,
    /// Tail index of the symmetrized-Pareto law; only read for `HeavyTail`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heavy_tail_exponent: Option<f64>,
    pub master_seed: u64,
}

impl EnsembleSpec {
    /// Gaussian Orthogonal Ensemble of dimension `n`.
    pub fn goe(n: usize, master_seed: u64) -> Self {
        Self {
            symmetry_class: SymmetryClass::RealSymmetric,
            entry_law: EntryLaw::Gaussian,
            dimension: n,
            diagonal_variance: 2.0,
            heavy_tail_exponent: None,
            master_seed,
        }
    }

    /// Gaussian Unitary Ensemble of dimension `n`.
    pub fn gue(n: usize, master_seed: u64) -> Self {
        Self {
            symmetry_class: SymmetryClass::ComplexHermitian,
            entry_law: EntryLaw::Gaussian,
            dimension: n,
            diagonal_variance: 1.0,
            heavy_tail_exponent: None,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 1 {
            return Err(Error::config("dimension: must be >= 1"));
        }
        if !(self.diagonal_variance >= 0.0) {
            return Err(Error::config("diagonal_variance: must be >= 0"));
        }
        if self.entry_law == EntryLaw::HeavyTail {
            match self.heavy_tail_exponent {
                Some(a) if a > 4.0 => {}
                Some(a) => {
                    return Err(Error::config(format!(
                        "heavy_tail_exponent: must be > 4, got {a}"
                    )))
                }
                None => {
                    return Err(Error::config(
                        "heavy_tail_exponent: required for entry_law = heavy_tail",
                    ))
                }
            }
        }
        Ok(())
    }

    /// One unit-variance real draw of the entry law.
    #[inline]
    fn draw_real(&self, d: &mut EntryDraws<'_>) -> f64 {
        match self.entry_law {
            EntryLaw::Gaussian => d.normal(),
            EntryLaw::Rademacher => d.sign(),
            // Uniform on [-sqrt(3), sqrt(3)] has unit variance.
            EntryLaw::Uniform => (2.0 * d.uniform() - 1.0) * 3f64.sqrt(),
            EntryLaw::HeavyTail => {
                // Symmetrized Pareto with tail index a, rescaled to unit
                // variance: E P^2 = a/(a-2) for P = U^(-1/a).
                let a = self.heavy_tail_exponent.expect("validated");
                let p = d.uniform_open0().powf(-1.0 / a);
                let scale = ((a - 2.0) / a).sqrt();
                d.sign() * p * scale
            }
        }
    }
}

/// Where a matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub sample_index: u64,
}

/// Dense Hermitian storage. The real class stores plain f64 so that the
/// eigensolver's hot loops never touch zero imaginary parts.
#[derive(Debug, Clone)]
pub enum MatrixData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// One sampled Wigner matrix (row-major dense storage, both triangles).
#[derive(Debug, Clone)]
pub struct MatrixSample {
    data: MatrixData,
    n: usize,
    pub provenance: Provenance,
}

impl MatrixSample {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &MatrixData {
        &self.data
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.data {
            MatrixData::Real(a) => Complex64::new(a[i * self.n + j], 0.0),
            MatrixData::Complex(a) => a[i * self.n + j],
        }
    }

    /// Exact Hermitian symmetry, as built.
    pub fn is_hermitian(&self) -> bool {
        let n = self.n;
        match &self.data {
            MatrixData::Real(a) => (0..n).all(|i| (i..n).all(|j| a[i * n + j] == a[j * n + i])),
            MatrixData::Complex(a) => {
                (0..n).all(|i| (i..n).all(|j| a[i * n + j] == a[j * n + i].conj()))
            }
        }
    }

    pub fn trace(&self) -> f64 {
        let n = self.n;
        match &self.data {
            MatrixData::Real(a) => crate::sum::sum_kahan((0..n).map(|i| a[i * n + i])),
            MatrixData::Complex(a) => crate::sum::sum_kahan((0..n).map(|i| a[i * n + i].re)),
        }
    }

    /// Build from explicit real symmetric entries (row-major).
    pub fn from_real(entries: Vec<f64>, n: usize) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::config("entry buffer size does not match dimension"));
        }
        let s = Self {
            data: MatrixData::Real(entries),
            n,
            provenance: Provenance {
                master_seed: 0,
                sample_index: 0,
            },
        };
        if !s.is_hermitian() {
            return Err(Error::contract("matrix is not symmetric"));
        }
        Ok(s)
    }

    /// Build from explicit complex Hermitian entries (row-major).
    pub fn from_complex(entries: Vec<Complex64>, n: usize) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::config("entry buffer size does not match dimension"));
        }
        let s = Self {
            data: MatrixData::Complex(entries),
            n,
            provenance: Provenance {
                master_seed: 0,
                sample_index: 0,
            },
        };
        if !s.is_hermitian() {
            return Err(Error::contract("matrix is not Hermitian"));
        }
        Ok(s)
    }
}

/// Draw the matrix `(spec, sample_index)`. Deterministic per entry.
pub fn sample_matrix(spec: &EnsembleSpec, sample_index: u64) -> Result<MatrixSample> {
    spec.validate()?;
    let n = spec.dimension;
    let mut stream = CounterStream::new(spec.master_seed, sample_index);
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let diag_scale = (spec.diagonal_variance / n as f64).sqrt();
    let provenance = Provenance {
        master_seed: spec.master_seed,
        sample_index,
    };

    let data = match spec.symmetry_class {
        SymmetryClass::RealSymmetric => {
            let mut a = vec![0.0f64; n * n];
            for i in 0..n {
                let mut d = stream.at_counter((i * n + i) as u64);
                a[i * n + i] = spec.draw_real(&mut d) * diag_scale;
                for j in (i + 1)..n {
                    let mut d = stream.at_counter((i * n + j) as u64);
                    let x = spec.draw_real(&mut d) * inv_sqrt_n;
                    a[i * n + j] = x;
                    a[j * n + i] = x;
                }
            }
            MatrixData::Real(a)
        }
        SymmetryClass::ComplexHermitian => {
            let half = std::f64::consts::FRAC_1_SQRT_2;
            let mut a = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                let mut d = stream.at_counter((i * n + i) as u64);
                a[i * n + i] = Complex64::new(spec.draw_real(&mut d) * diag_scale, 0.0);
                for j in (i + 1)..n {
                    let mut d = stream.at_counter((i * n + j) as u64);
                    let re = spec.draw_real(&mut d);
                    let im = spec.draw_real(&mut d);
                    let z = Complex64::new(re, im) * (half * inv_sqrt_n);
                    a[i * n + j] = z;
                    a[j * n + i] = z.conj();
                }
            }
            MatrixData::Complex(a)
        }
    };

    Ok(MatrixSample {
        data,
        n,
        provenance,
    })
}

/// Empirical moments of one entry with batch standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct EntryMoments {
    pub mean: (f64, f64),
    pub mean_se: f64,
    /// E |sqrt(N) H|^2
    pub second_abs: f64,
    pub second_abs_se: f64,
    /// E |sqrt(N) H|^4
    pub fourth_abs: f64,
    pub fourth_abs_se: f64,
    /// E |sqrt(N) H|^6
    pub sixth_abs: f64,
    pub sixth_abs_se: f64,
    /// E (sqrt(N) H)^2 -- zero for the complex class off-diagonal.
    pub pseudo_variance: (f64, f64),
    pub pseudo_variance_se: f64,
}

/// Moment table for a representative off-diagonal and diagonal entry.
#[derive(Debug, Clone, Serialize)]
pub struct MomentTable {
    pub num_samples: usize,
    pub offdiagonal: EntryMoments,
    pub diagonal: EntryMoments,
}

/// Certify an entry law empirically: draws `sqrt(N) H_ij` for a
/// representative off-diagonal entry (0, 1) and the diagonal entry (0, 0)
/// across `num_samples` independent samples.
pub fn entry_moment_report(spec: &EnsembleSpec, num_samples: usize) -> Result<MomentTable> {
    spec.validate()?;
    if num_samples < 100 {
        return Err(Error::config("num_samples: must be >= 100"));
    }
    if spec.dimension < 2 {
        return Err(Error::config(
            "dimension: moment report needs an off-diagonal entry",
        ));
    }
    let n = spec.dimension;
    let sqrt_n = (n as f64).sqrt();

    let mut off = Vec::with_capacity(num_samples);
    let mut diag = Vec::with_capacity(num_samples);
    for s in 0..num_samples {
        let mut stream = CounterStream::new(spec.master_seed, s as u64);
        // Entry (0, 1), rescaled by sqrt(N).
        let mut d = stream.at_counter(1);
        let z = match spec.symmetry_class {
            SymmetryClass::RealSymmetric => {
                Complex64::new(spec.draw_real(&mut d) / sqrt_n, 0.0)
            }
            SymmetryClass::ComplexHermitian => {
                let re = spec.draw_real(&mut d);
                let im = spec.draw_real(&mut d);
                Complex64::new(re, im) * (std::f64::consts::FRAC_1_SQRT_2 / sqrt_n)
            }
        };
        off.push(z * sqrt_n);
        // Entry (0, 0).
        let mut d = stream.at_counter(0);
        let diag_scale = (spec.diagonal_variance / n as f64).sqrt();
        diag.push(Complex64::new(spec.draw_real(&mut d) * diag_scale * sqrt_n, 0.0));
    }

    Ok(MomentTable {
        num_samples,
        offdiagonal: entry_moments(&off),
        diagonal: entry_moments(&diag),
    })
}

fn entry_moments(values: &[Complex64]) -> EntryMoments {
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    let abs2: Vec<f64> = values.iter().map(|z| z.norm_sqr()).collect();
    let abs4: Vec<f64> = abs2.iter().map(|a| a * a).collect();
    let abs6: Vec<f64> = abs2.iter().map(|a| a * a * a).collect();
    let p_re: Vec<f64> = values.iter().map(|z| (z * z).re).collect();
    let p_im: Vec<f64> = values.iter().map(|z| (z * z).im).collect();

    let (mean_re, se_re) = batch_mean_se(&re);
    let (mean_im, se_im) = batch_mean_se(&im);
    let (m2, se2) = batch_mean_se(&abs2);
    let (m4, se4) = batch_mean_se(&abs4);
    let (m6, se6) = batch_mean_se(&abs6);
    let (pv_re, pv_se_re) = batch_mean_se(&p_re);
    let (pv_im, pv_se_im) = batch_mean_se(&p_im);

    EntryMoments {
        mean: (mean_re, mean_im),
        mean_se: se_re.hypot(se_im),
        second_abs: m2,
        second_abs_se: se2,
        fourth_abs: m4,
        fourth_abs_se: se4,
        sixth_abs: m6,
        sixth_abs_se: se6,
        pseudo_variance: (pv_re, pv_im),
        pseudo_variance_se: pv_se_re.hypot(pv_se_im),
    }
}
