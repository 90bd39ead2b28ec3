//! Dense Hermitian eigenvalue engine and the raw spectral statistics built
//! from eigenvalues.

pub mod linsolve;
pub mod tridiag;

use num_complex::Complex64;

use crate::ensemble::{MatrixData, MatrixSample, Provenance};
use crate::error::{Error, Result};
use crate::sum::{sum_kahan, sum_kahan_c, KahanSum};
use crate::theory;
use crate::theory::TestFunction;

pub use linsolve::ComplexMatrix;

/// Sorted eigenvalues of one matrix sample; the sole input to all linear
/// statistics.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    provenance: Provenance,
}

impl Spectrum {
    /// Wrap externally computed eigenvalues (sorted on entry or not).
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, provenance: Provenance) -> Self {
        eigenvalues.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Self {
            eigenvalues,
            provenance,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// All eigenvalues of a Hermitian sample to absolute accuracy `tol * ||H||`.
///
/// Unitary Householder reduction to a real symmetric tridiagonal matrix
/// (complex reflectors in the complex class), then implicit-shift QL with
/// Wilkinson shifts. Eigenvalues only; no transformation accumulation.
pub fn eigenvalues(sample: &MatrixSample, tol: f64) -> Result<Spectrum> {
    if !sample.is_hermitian() {
        return Err(Error::contract("eigenvalues: input is not Hermitian"));
    }
    if tol < f64::EPSILON {
        return Err(Error::config(format!(
            "eigenvalues: requested tolerance {tol} is below machine precision"
        )));
    }
    let n = sample.dimension();
    let trace = sample.trace();
    let t = match sample.data() {
        MatrixData::Real(a) => {
            let mut work = a.clone();
            tridiag::tridiagonalize_real(&mut work, n)
        }
        MatrixData::Complex(a) => {
            let mut work = a.clone();
            tridiag::tridiagonalize_hermitian(&mut work, n)
        }
    };
    let ev = tridiag::tridiagonal_eigenvalues(&t).map_err(|e| {
        Error::numerical(format!(
            "{e} (sample: seed {}, index {})",
            sample.provenance.master_seed, sample.provenance.sample_index
        ))
    })?;

    // Trace must be preserved by the orthogonal/unitary reduction.
    let ev_sum = sum_kahan(ev.iter().copied());
    let scale = ev.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if (ev_sum - trace).abs() > n as f64 * 1e-10 * scale {
        return Err(Error::numerical(format!(
            "eigenvalue sum {ev_sum} deviates from trace {trace} beyond N*1e-10 (sample: seed {}, index {})",
            sample.provenance.master_seed, sample.provenance.sample_index
        )));
    }
    Ok(Spectrum {
        eigenvalues: ev,
        provenance: sample.provenance,
    })
}

/// Normalized resolvent trace (1/N) sum_i (lambda_i - z)^{-1}.
pub fn trace_resolvent(spectrum: &Spectrum, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::domain("trace_resolvent: Im z must be nonzero"));
    }
    let n = spectrum.dimension() as f64;
    let sum = sum_kahan_c(
        spectrum
            .eigenvalues
            .iter()
            .map(|&l| (Complex64::new(l, 0.0) - z).inv()),
    );
    Ok(sum / n)
}

/// Linear eigenvalue statistic sum_i f((lambda_i - E)/eta).
pub fn linear_statistic(spectrum: &Spectrum, f: &TestFunction, energy: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::domain("linear_statistic: eta must be positive"));
    }
    let mut acc = KahanSum::new();
    for &l in &spectrum.eigenvalues {
        acc.add(f.eval((l - energy) / eta));
    }
    Ok(acc.value())
}

/// Full resolvent matrix G(z) = (H - z)^{-1} from a single LU factorization.
pub fn resolvent_matrix(sample: &MatrixSample, z: Complex64) -> Result<ComplexMatrix> {
    if z.im == 0.0 {
        return Err(Error::domain("resolvent_matrix: Im z must be nonzero"));
    }
    let n = sample.dimension();
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    match sample.data() {
        MatrixData::Real(h) => {
            for (dst, &src) in a.iter_mut().zip(h.iter()) {
                *dst = Complex64::new(src, 0.0);
            }
        }
        MatrixData::Complex(h) => a.copy_from_slice(h),
    }
    for i in 0..n {
        a[i * n + i] -= z;
    }
    let lu = linsolve::lu_factor(a, n)?;
    Ok(lu.inverse())
}

/// Max-norm residual ||(H - z) G - I||_max; diagnostic companion to
/// `resolvent_matrix`.
pub fn resolvent_residual(sample: &MatrixSample, z: Complex64, g: &ComplexMatrix) -> f64 {
    let n = sample.dimension();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let h_ik = sample.entry(i, k) - if i == k { z } else { Complex64::new(0.0, 0.0) };
                acc += h_ik * g.entry(k, j);
            }
            if i == j {
                acc -= Complex64::new(1.0, 0.0);
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// Sup-distance between the empirical eigenvalue CDF and the semicircle CDF.
pub fn empirical_cdf_distance(spectrum: &Spectrum) -> f64 {
    let n = spectrum.dimension();
    let nf = n as f64;
    let mut sup = 0.0f64;
    for (i, &l) in spectrum.eigenvalues.iter().enumerate() {
        let f = theory::semicircle_cdf(l);
        let upper = (i as f64 + 1.0) / nf - f;
        let lower = f - i as f64 / nf;
        sup = sup.max(upper).max(lower);
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_matrix, EnsembleSpec};

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
    fn swap_matrix_eigenvalues() {
        let m = MatrixSample::from_real(vec![0.0, 1.0, 1.0, 0.0], 2).unwrap();
        let s = eigenvalues(&m, 1e-12).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn all_ones_matrix_is_rank_one() {
        let m = MatrixSample::from_real(vec![1.0; 9], 3).unwrap();
        let s = eigenvalues(&m, 1e-12).unwrap();
        let ev = s.eigenvalues();
        assert!(ev[0].abs() < 1e-13 && ev[1].abs() < 1e-13);
        assert!((ev[2] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn non_hermitian_input_is_a_contract_violation() {
        let m = MatrixSample::from_real(vec![0.0, 1.0, 2.0, 0.0], 2);
        assert!(matches!(m, Err(Error::Contract(_))));
    }

    #[test]
    fn weyl_shift_moves_eigenvalues_exactly() {
        let spec = EnsembleSpec::goe(12, 21);
        let m = sample_matrix(&spec, 0).unwrap();
        let base = eigenvalues(&m, 1e-12).unwrap();
        let eps = 0.375; // exactly representable
        let shifted = match m.data() {
            MatrixData::Real(a) => {
                let mut b = a.clone();
                for i in 0..12 {
                    b[i * 12 + i] += eps;
                }
                MatrixSample::from_real(b, 12).unwrap()
            }
            _ => unreachable!(),
        };
        let moved = eigenvalues(&shifted, 1e-12).unwrap();
        for (a, b) in base.eigenvalues().iter().zip(moved.eigenvalues()) {
            assert!((a + eps - b).abs() < 1e-12 * 12.0);
        }
    }

    #[test]
    fn trace_resolvent_known_values() {
        let i = Complex64::new(0.0, 1.0);
        // Spectrum {0}: 1/(0 - i) = i.
        let s = spectrum_of(&[0.0]);
        let g = trace_resolvent(&s, i).unwrap();
        assert!((g - i).norm() < 1e-15);
        // Spectrum {-1, 1} at z = i: (1/2)[1/(-1-i) + 1/(1-i)] = i/2.
        let s = spectrum_of(&[-1.0, 1.0]);
        let g = trace_resolvent(&s, i).unwrap();
        assert!((g - i / 2.0).norm() < 1e-15);
    }

    #[test]
    fn trace_resolvent_is_herglotz_and_conjugate_symmetric() {
        let s = spectrum_of(&[-1.3, -0.2, 0.0, 0.7, 1.9]);
        for &(re, im) in &[(0.3, 0.5), (-1.0, 0.01), (2.5, 3.0)] {
            let z = Complex64::new(re, im);
            let g = trace_resolvent(&s, z).unwrap();
            assert!(g.im > 0.0);
            let gc = trace_resolvent(&s, z.conj()).unwrap();
            assert!((gc - g.conj()).norm() < 1e-15);
        }
        assert!(matches!(
            trace_resolvent(&s, Complex64::new(0.5, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn linear_statistic_matches_hand_values() {
        let cauchy = TestFunction::cauchy();
        let s = spectrum_of(&[0.0]);
        assert!((linear_statistic(&s, &cauchy, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let s = spectrum_of(&[-1.0, 1.0]);
        assert!((linear_statistic(&s, &cauchy, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(linear_statistic(&s, &cauchy, 0.0, -1.0).is_err());
    }

    #[test]
    fn resolvent_of_zero_matrix() {
        let m = MatrixSample::from_real(vec![0.0; 4], 2).unwrap();
        let z = Complex64::new(0.0, 1.0);
        let g = resolvent_matrix(&m, z).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert!((g.entry(0, 0) - i).norm() < 1e-15);
        assert!((g.entry(1, 1) - i).norm() < 1e-15);
        assert!(g.entry(0, 1).norm() < 1e-15);
    }

    #[test]
    fn resolvent_trace_agrees_with_spectral_route() {
        let spec = EnsembleSpec::goe(16, 4);
        let m = sample_matrix(&spec, 3).unwrap();
        let z = Complex64::new(0.2, 0.3);
        let g = resolvent_matrix(&m, z).unwrap();
        let s = eigenvalues(&m, 1e-12).unwrap();
        let via_spectrum = trace_resolvent(&s, z).unwrap();
        let via_matrix = g.trace() / 16.0;
        assert!(
            (via_spectrum - via_matrix).norm() < 1e-6,
            "{via_spectrum} vs {via_matrix}"
        );
        let res = resolvent_residual(&m, z, &g);
        assert!(res <= 1e-8 * (1.0 + 1.0 / z.im.abs()), "residual {res}");
    }

    #[test]
    fn real_class_resolvent_is_complex_symmetric() {
        let spec = EnsembleSpec::goe(10, 9);
        let m = sample_matrix(&spec, 1).unwrap();
        let g = resolvent_matrix(&m, Complex64::new(0.1, 0.05)).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                assert!((g.entry(i, j) - g.entry(j, i)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn eigenvector_residuals_via_inverse_iteration() {
        // For N <= 16, every reported eigenvalue admits a vector with
        // ||Hv - lambda v|| <= 1e-8 ||H||.
        let spec = EnsembleSpec::gue(12, 77);
        let m = sample_matrix(&spec, 2).unwrap();
        let s = eigenvalues(&m, 1e-12).unwrap();
        let n = m.dimension();
        let norm_h = s
            .eigenvalues()
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        for &lambda in s.eigenvalues() {
            let z = Complex64::new(lambda, 1e-11);
            let g = resolvent_matrix(&m, z).unwrap();
            // One inverse-iteration step from a fixed starting vector.
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            for (k, vk) in v.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += g.entry(k, j) * Complex64::new(1.0 + j as f64 / n as f64, 0.3);
                }
                *vk = acc;
            }
            let norm_v = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let mut res = 0.0f64;
            let mut resv = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += m.entry(i, j) * v[j];
                }
                resv[i] = acc - v[i] * lambda;
            }
            for r in &resv {
                res += r.norm_sqr();
            }
            let res = res.sqrt() / norm_v;
            assert!(
                res <= 1e-8 * norm_h.max(1.0),
                "eigenpair residual {res} at lambda {lambda}"
            );
        }
    }

    #[test]
    fn cdf_distance_edge_cases() {
        // Single eigenvalue far outside the support.
        let s = spectrum_of(&[5.0]);
        assert!((empirical_cdf_distance(&s) - 1.0).abs() < 1e-12);
        // Eigenvalues at semicircle quantiles keep the distance below 1/N.
        let n = 4;
        let qs: Vec<f64> = (0..n)
            .map(|i| {
                let target = (i as f64 + 0.5) / n as f64;
                // bisect the semicircle CDF
                let (mut lo, mut hi) = (-2.0, 2.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if theory::semicircle_cdf(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let s = spectrum_of(&qs);
        assert!(empirical_cdf_distance(&s) <= 0.25 + 1e-9);
    }
}
