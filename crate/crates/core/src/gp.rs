//! Samplers for the limiting Gaussian processes: Y(b) through its explicit
//! series representation and Z(f) through a factorization of the H^{1/2}
//! Gram matrix.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{normal_from, CounterStream};
use crate::theory::{self, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GPConfig {
    pub truncation_k: usize,
    pub seed: u64,
    /// Target omitted-tail variance per spectral point.
    pub target_tail_variance: f64,
}

impl GPConfig {
    pub fn new(truncation_k: usize, seed: u64) -> Self {
        Self {
            truncation_k,
            seed,
            target_tail_variance: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation_k < 1 {
            return Err(Error::config("truncation_k: must be >= 1"));
        }
        if !(self.target_tail_variance > 0.0) {
            return Err(Error::config("target_tail_variance: must be > 0"));
        }
        Ok(())
    }
}

/// Series prefactor (1/sqrt 2) (2/(b+i))^2 and ratio (b-i)/(b+i).
fn series_terms(b: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let pre = (2.0 / (b + i)).powu(2) / 2f64.sqrt();
    let ratio = (b - i) / (b + i);
    (pre, ratio)
}

/// Omitted-tail variance of the series truncated after index k:
/// |pre|^2 sum_{j > k} (j+1) r^{2j} in closed form.
fn tail_variance(b: Complex64, k: usize) -> f64 {
    let (pre, ratio) = series_terms(b);
    let x = ratio.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let kp1 = (k + 1) as f64;
    let one_minus = 1.0 - x;
    pre.norm_sqr() * x.powf(kp1) * (kp1 / one_minus + 1.0 / (one_minus * one_minus))
}

/// Smallest truncation index K whose omitted-tail variance stays below
/// `eps` at every requested spectral point.
pub fn choose_truncation(b_points: &[Complex64], eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::config("choose_truncation: eps must be > 0"));
    }
    for b in b_points {
        if b.im <= 0.0 {
            return Err(Error::domain(
                "choose_truncation: b must lie in the upper half-plane",
            ));
        }
    }
    let mut k = 1usize;
    loop {
        if b_points.iter().all(|&b| tail_variance(b, k) <= eps) {
            return Ok(k);
        }
        k += 1;
        if k > 50_000_000 {
            return Err(Error::numerical(
                "choose_truncation: truncation index exceeded 5e7; spectral point too close to the real axis",
            ));
        }
    }
}

/// Draw `num_samples` joint realizations of (Y(b))_{b in b_points} from the
/// truncated series. Row s is a pure function of (config.seed, s).
pub fn sample_y(
    b_points: &[Complex64],
    config: &GPConfig,
    num_samples: usize,
) -> Result<Vec<Vec<Complex64>>> {
    config.validate()?;
    for b in b_points {
        if b.im <= 0.0 {
            return Err(Error::domain(
                "sample_y: b must lie in the upper half-plane",
            ));
        }
    }
    let k = config.truncation_k;
    let terms: Vec<(Complex64, Complex64)> = b_points.iter().map(|&b| series_terms(b)).collect();
    let sqrt_kp1: Vec<f64> = (0..=k).map(|j| ((j + 1) as f64).sqrt()).collect();
    let seed = config.seed;

    let rows: Vec<Vec<Complex64>> = (0..num_samples as u64)
        .into_par_iter()
        .map(|row| {
            let mut stream = CounterStream::new(seed, row);
            let rng = stream.rng();
            // One family of standard complex Gaussians, shared by all b.
            let half = std::f64::consts::FRAC_1_SQRT_2;
            let thetas: Vec<Complex64> = (0..=k)
                .map(|_| {
                    let g1 = normal_from(rng);
                    let g2 = normal_from(rng);
                    Complex64::new(g1 * half, g2 * half)
                })
                .collect();
            terms
                .iter()
                .map(|&(pre, ratio)| {
                    let mut pow = Complex64::new(1.0, 0.0);
                    let mut acc = crate::sum::KahanSumC::new();
                    for (j, theta) in thetas.iter().enumerate() {
                        acc.add(pow * sqrt_kp1[j] * theta);
                        pow *= ratio;
                    }
                    pre * acc.value()
                })
                .collect()
        })
        .collect();
    Ok(rows)
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
/// Returns (eigenvalues, eigenvectors as columns, row-major).
fn jacobi_eigen(mut a: Vec<f64>, p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; p * p];
    for i in 0..p {
        v[i * p + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..p {
            for j in (i + 1)..p {
                off += a[i * p + j] * a[i * p + j];
            }
        }
        let scale: f64 = (0..p).map(|i| a[i * p + i].abs()).fold(1e-300, f64::max);
        if off.sqrt() <= 1e-15 * scale * p as f64 {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let apq = a[i * p + j];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[j * p + j] - a[i * p + i]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..p {
                    let aik = a[i * p + k];
                    let ajk = a[j * p + k];
                    a[i * p + k] = c * aik - s * ajk;
                    a[j * p + k] = s * aik + c * ajk;
                }
                for k in 0..p {
                    let aki = a[k * p + i];
                    let akj = a[k * p + j];
                    a[k * p + i] = c * aki - s * akj;
                    a[k * p + j] = s * aki + c * akj;
                    let vki = v[k * p + i];
                    let vkj = v[k * p + j];
                    v[k * p + i] = c * vki - s * vkj;
                    v[k * p + j] = s * vki + c * vkj;
                }
            }
        }
    }
    let ev = (0..p).map(|i| a[i * p + i]).collect();
    (ev, v)
}

/// Draw `num_samples` joint realizations of (Z(f))_{f in f_list}: mean-zero
/// Gaussian vectors with the H^{1/2} Gram matrix, factorized through its
/// eigendecomposition. A jitter of 1e-10 * trace is added when the smallest
/// eigenvalue sits in (-1e-8, 0).
pub fn sample_z(f_list: &[TestFunction], num_samples: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if f_list.is_empty() {
        return Err(Error::config("sample_z: empty function list"));
    }
    let p = f_list.len();
    let mut gram = vec![0.0; p * p];
    for i in 0..p {
        for j in i..p {
            let v = theory::h_half_covariance(&f_list[i], &f_list[j])?;
            gram[i * p + j] = v;
            gram[j * p + i] = v;
        }
    }
    let trace: f64 = (0..p).map(|i| gram[i * p + i]).sum();
    let (mut evals, evecs) = jacobi_eigen(gram, p);
    let min_eval = evals.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eval <= -1e-8 {
        return Err(Error::numerical(format!(
            "sample_z: Gram matrix indefinite beyond jitter (smallest eigenvalue {min_eval:.3e})"
        )));
    }
    if min_eval < 0.0 {
        let jitter = 1e-10 * trace;
        for e in evals.iter_mut() {
            *e += jitter;
        }
    }
    // Factor B = Q sqrt(max(lambda, 0)); then z = B g has covariance Gram.
    let mut factor = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            factor[i * p + j] = evecs[i * p + j] * evals[j].max(0.0).sqrt();
        }
    }

    let rows: Vec<Vec<f64>> = (0..num_samples as u64)
        .into_par_iter()
        .map(|row| {
            let mut stream = CounterStream::new(seed, row);
            let rng = stream.rng();
            let g: Vec<f64> = (0..p).map(|_| normal_from(rng)).collect();
            (0..p)
                .map(|i| (0..p).map(|j| factor[i * p + j] * g[j]).sum())
                .collect()
        })
        .collect();
    Ok(rows)
}
