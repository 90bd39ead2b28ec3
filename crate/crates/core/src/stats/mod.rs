//! Monte Carlo experiment engine: mixed moments of centred resolvent
//! traces, distributional tests against the limiting processes, cumulant
//! machinery, and rate-exponent fits.

pub mod accum;
pub mod cumulants;
pub mod fit;
pub mod ks;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{sample_matrix, EnsembleSpec, SymmetryClass};
use crate::error::{Error, Result};
use crate::spectral;
use crate::theory::{self, MesoscopicScale, TestFunction};

pub use accum::{Est, EstC, MCAccumulator, MCSummary};
pub use cumulants::{
    cumulant_expansion_check, cumulants_from_moments, cumulants_from_samples,
    moments_from_cumulants, CumulantVector, ExpansionCheck, ScalarLaw, SmoothFn,
};
pub use fit::{log_log_fit, SlopeFit};
pub use ks::{ks_normality_test, KsResult};

const EIGEN_TOL: f64 = 1e-10;
/// Abort threshold: more than 1% failed samples invalidates an experiment.
const MAX_ABORT_FRACTION: f64 = 0.01;

/// Raw per-sample spectral observables shared by the experiments: the
/// normalized resolvent trace at each requested spectral point and the raw
/// linear statistic for each requested test function. One spectrum per
/// sample serves every observable.
pub struct SweepData {
    pub eta: f64,
    /// m(E + b eta) for each b.
    pub m_values: Vec<Complex64>,
    /// Centring integrals N int rho f((x-E)/eta) dx for each f.
    pub centrings: Vec<f64>,
    /// Per retained sample: (sample_index, Gbar(E + b eta) per b, Tr f per f).
    pub rows: Vec<(u64, Vec<Complex64>, Vec<f64>)>,
    /// Raw spectra, kept only when the caller asked for persistence.
    pub spectra: Vec<(u64, Vec<f64>)>,
    pub aborted: usize,
}

fn run_sweep(
    spec: &EnsembleSpec,
    scale: &MesoscopicScale,
    b_points: &[Complex64],
    fns: &[TestFunction],
    num_samples: usize,
    keep_spectra: bool,
) -> Result<SweepData> {
    spec.validate()?;
    scale.validate()?;
    if b_points.iter().any(|b| b.im <= 0.0) {
        return Err(Error::domain(
            "spectral points b must lie in the upper half-plane",
        ));
    }
    let n = spec.dimension;
    let eta = scale.eta(n);
    let energy = scale.energy;
    let z_points: Vec<Complex64> = b_points
        .iter()
        .map(|b| Complex64::new(energy, 0.0) + b * eta)
        .collect();
    let m_values: Vec<Complex64> = z_points
        .iter()
        .map(|&z| theory::stieltjes_m(z))
        .collect::<Result<_>>()?;
    let centrings: Vec<f64> = fns
        .iter()
        .map(|f| theory::centering_integral(f, energy, eta, n))
        .collect::<Result<_>>()?;

    type SweepRow = (u64, Vec<Complex64>, Vec<f64>, Option<Vec<f64>>);
    let results: Vec<std::result::Result<SweepRow, String>> = (0..num_samples as u64)
        .into_par_iter()
        .map(|s| {
            let matrix = sample_matrix(spec, s).map_err(|e| e.to_string())?;
            let spectrum = spectral::eigenvalues(&matrix, EIGEN_TOL).map_err(|e| e.to_string())?;
            let gbar: Vec<Complex64> = z_points
                .iter()
                .map(|&z| spectral::trace_resolvent(&spectrum, z).map_err(|e| e.to_string()))
                .collect::<std::result::Result<_, String>>()?;
            let lin: Vec<f64> = fns
                .iter()
                .map(|f| {
                    spectral::linear_statistic(&spectrum, f, energy, eta).map_err(|e| e.to_string())
                })
                .collect::<std::result::Result<_, String>>()?;
            let kept = keep_spectra.then(|| spectrum.eigenvalues().to_vec());
            Ok((s, gbar, lin, kept))
        })
        .collect();

    let mut rows = Vec::with_capacity(num_samples);
    let mut spectra = Vec::new();
    let mut aborted = 0usize;
    let mut first_error = None;
    for r in results {
        match r {
            Ok((s, gbar, lin, kept)) => {
                if let Some(ev) = kept {
                    spectra.push((s, ev));
                }
                rows.push((s, gbar, lin));
            }
            Err(e) => {
                aborted += 1;
                first_error.get_or_insert(e);
            }
        }
    }
    if (aborted as f64) > MAX_ABORT_FRACTION * num_samples as f64 {
        return Err(Error::experiment(format!(
            "{aborted}/{num_samples} samples aborted (first error: {})",
            first_error.unwrap_or_default()
        )));
    }
    Ok(SweepData {
        eta,
        m_values,
        centrings,
        rows,
        spectra,
        aborted,
    })
}

/// Empirical law of the rescaled centred resolvent traces
/// Yhat(b) = N eta (Gbar(E + b eta) - m(E + b eta)).
#[derive(Debug, Clone, Serialize)]
pub struct ResolventExperiment {
    pub dimension: usize,
    pub eta: f64,
    pub num_samples: usize,
    pub aborted: usize,
    pub b_points: Vec<(f64, f64)>,
    pub means: Vec<EstC>,
    /// Raw second moments E Yhat(b_j) conj(Yhat(b_k)).
    pub cov_empirical: Vec<Vec<EstC>>,
    /// Raw pseudo-moments E Yhat(b_j) Yhat(b_k); zero in the limit.
    pub pseudo_cov_empirical: Vec<Vec<EstC>>,
    /// Limiting kernel of Yhat in this symmetry class:
    /// -2/(b_j - conj(b_k))^2, halved for complex Hermitian ensembles.
    pub cov_theory: Vec<Vec<(f64, f64)>>,
    /// Centred mixed moments E <conj Yhat>^n <Yhat>^m up to degree 4, per b.
    pub mixed_moments: Vec<BTreeMap<(u32, u32), EstC>>,
    /// Per-sample Yhat rows in ascending sample order (for KS tests and
    /// persistence), with their originating sample indices.
    #[serde(skip)]
    pub sample_indices: Vec<u64>,
    #[serde(skip)]
    pub samples: Vec<Vec<(f64, f64)>>,
    /// Raw spectra when requested through `run_resolvent_experiment_with`.
    #[serde(skip)]
    pub spectra: Vec<(u64, Vec<f64>)>,
}

pub fn run_resolvent_experiment(
    spec: &EnsembleSpec,
    scale: &MesoscopicScale,
    b_points: &[Complex64],
    num_samples: usize,
) -> Result<ResolventExperiment> {
    run_resolvent_experiment_with(spec, scale, b_points, num_samples, false)
}

pub fn run_resolvent_experiment_with(
    spec: &EnsembleSpec,
    scale: &MesoscopicScale,
    b_points: &[Complex64],
    num_samples: usize,
    keep_spectra: bool,
) -> Result<ResolventExperiment> {
    if num_samples < 64 {
        return Err(Error::config(
            "run_resolvent_experiment: need at least 64 samples",
        ));
    }
    if b_points.is_empty() {
        return Err(Error::config("run_resolvent_experiment: no b points"));
    }
    let sweep = run_sweep(spec, scale, b_points, &[], num_samples, keep_spectra)?;
    let n_eta = spec.dimension as f64 * sweep.eta;

    let mut acc = MCAccumulator::new(b_points.len());
    for (s, gbar, _) in &sweep.rows {
        let row: Vec<Complex64> = gbar
            .iter()
            .zip(&sweep.m_values)
            .map(|(g, m)| (g - m) * n_eta)
            .collect();
        acc.push(*s, row);
    }
    let summary = acc.finalize(4);
    let ordered = acc.ordered_rows();
    let sample_indices: Vec<u64> = ordered.iter().map(|(i, _)| *i).collect();
    let samples: Vec<Vec<(f64, f64)>> = ordered
        .into_iter()
        .map(|(_, row)| row.into_iter().map(|z| (z.re, z.im)).collect())
        .collect();

    let p = b_points.len();
    let class_factor = if spec.symmetry_class == SymmetryClass::ComplexHermitian {
        0.5
    } else {
        1.0
    };
    let mut cov_theory = vec![vec![(0.0, 0.0); p]; p];
    for j in 0..p {
        for k in 0..p {
            let (c, _) = theory::resolvent_covariance(b_points[j], b_points[k])?;
            cov_theory[j][k] = (class_factor * c.re, class_factor * c.im);
        }
    }

    Ok(ResolventExperiment {
        dimension: spec.dimension,
        eta: sweep.eta,
        num_samples: sweep.rows.len(),
        aborted: sweep.aborted,
        b_points: b_points.iter().map(|b| (b.re, b.im)).collect(),
        means: summary.means,
        cov_empirical: summary.cross_conj,
        pseudo_cov_empirical: summary.cross_plain,
        cov_theory,
        mixed_moments: summary.mixed,
        sample_indices,
        samples,
        spectra: sweep.spectra,
    })
}

/// Empirical law of the centred linear statistics
/// Zhat(f) = Tr f((H-E)/eta) - N int rho(x) f((x-E)/eta) dx.
#[derive(Debug, Clone, Serialize)]
pub struct LinstatExperiment {
    pub dimension: usize,
    pub eta: f64,
    pub num_samples: usize,
    pub aborted: usize,
    pub labels: Vec<String>,
    pub means: Vec<EstC>,
    /// Centred empirical covariance matrix of (Zhat(f_j)).
    pub covariance: Vec<Vec<EstC>>,
    /// Limiting H^{1/2} covariance matrix.
    pub cov_theory: Vec<Vec<f64>>,
    /// Per f: variance, third and fourth cumulants with error bars.
    pub variance: Vec<EstC>,
    pub third_cumulant: Vec<Est>,
    pub fourth_cumulant: Vec<Est>,
    #[serde(skip)]
    pub sample_indices: Vec<u64>,
    #[serde(skip)]
    pub samples: Vec<Vec<f64>>,
    /// Raw spectra when requested through `run_linstat_experiment_with`.
    #[serde(skip)]
    pub spectra: Vec<(u64, Vec<f64>)>,
}

pub fn run_linstat_experiment(
    spec: &EnsembleSpec,
    scale: &MesoscopicScale,
    fns: &[TestFunction],
    num_samples: usize,
) -> Result<LinstatExperiment> {
    run_linstat_experiment_with(spec, scale, fns, num_samples, false)
}

pub fn run_linstat_experiment_with(
    spec: &EnsembleSpec,
    scale: &MesoscopicScale,
    fns: &[TestFunction],
    num_samples: usize,
    keep_spectra: bool,
) -> Result<LinstatExperiment> {
    if num_samples < 64 {
        return Err(Error::config(
            "run_linstat_experiment: need at least 64 samples",
        ));
    }
    if fns.is_empty() {
        return Err(Error::config("run_linstat_experiment: no test functions"));
    }
    let sweep = run_sweep(spec, scale, &[], fns, num_samples, keep_spectra)?;

    let mut acc = MCAccumulator::new(fns.len());
    for (s, _, lin) in &sweep.rows {
        let row: Vec<Complex64> = lin
            .iter()
            .zip(&sweep.centrings)
            .map(|(v, c)| Complex64::new(v - c, 0.0))
            .collect();
        acc.push(*s, row);
    }
    let summary = acc.finalize(4);
    let ordered = acc.ordered_rows();
    let sample_indices: Vec<u64> = ordered.iter().map(|(i, _)| *i).collect();
    let samples: Vec<Vec<f64>> = ordered
        .into_iter()
        .map(|(_, row)| row.into_iter().map(|z| z.re).collect())
        .collect();

    let p = fns.len();
    let mut cov_theory = vec![vec![0.0; p]; p];
    for j in 0..p {
        for k in j..p {
            let v = theory::h_half_covariance(&fns[j], &fns[k])?;
            let v = if spec.symmetry_class == SymmetryClass::ComplexHermitian {
                v / 2.0
            } else {
                v
            };
            cov_theory[j][k] = v;
            cov_theory[k][j] = v;
        }
    }

    let variance: Vec<EstC> = (0..p).map(|j| summary.mixed[j][&(1, 1)]).collect();
    let third_cumulant: Vec<Est> = (0..p)
        .map(|j| {
            let m3 = summary.mixed[j][&(0, 3)];
            Est {
                value: m3.re,
                se: m3.se_re,
            }
        })
        .collect();
    let fourth_cumulant: Vec<Est> = (0..p)
        .map(|j| {
            let m4 = summary.mixed[j][&(0, 4)];
            let m2 = summary.mixed[j][&(0, 2)];
            Est {
                value: m4.re - 3.0 * m2.re * m2.re,
                se: (m4.se_re.powi(2) + (6.0 * m2.re * m2.se_re).powi(2)).sqrt(),
            }
        })
        .collect();

    Ok(LinstatExperiment {
        dimension: spec.dimension,
        eta: sweep.eta,
        num_samples: sweep.rows.len(),
        aborted: sweep.aborted,
        labels: fns.iter().map(|f| f.label().to_string()).collect(),
        means: summary.means,
        covariance: summary.cross_centred,
        cov_theory,
        variance,
        third_cumulant,
        fourth_cumulant,
        sample_indices,
        samples,
        spectra: sweep.spectra,
    })
}

/// Observable entering the complex-vs-real variance ratio.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioObservable {
    /// E |Yhat(b)|^2 at one spectral point.
    AbsYSquared { b: (f64, f64) },
    /// Var Zhat(f) for a catalog test function.
    VarianceZ { label: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioResult {
    pub observable: RatioObservable,
    pub complex_value: Est,
    pub real_value: Est,
    pub ratio: Est,
}

/// Variance ratio complex class / real class for the given observables;
/// each side evaluates all observables from shared per-sample spectra.
pub fn complex_vs_real_ratio(
    real_spec: &EnsembleSpec,
    complex_spec: &EnsembleSpec,
    scale: &MesoscopicScale,
    observables: &[RatioObservable],
    num_samples: usize,
) -> Result<Vec<RatioResult>> {
    if real_spec.symmetry_class != SymmetryClass::RealSymmetric
        || complex_spec.symmetry_class != SymmetryClass::ComplexHermitian
    {
        return Err(Error::config(
            "complex_vs_real_ratio: specs must be (real_symmetric, complex_hermitian)",
        ));
    }
    if real_spec.dimension != complex_spec.dimension
        || real_spec.entry_law != complex_spec.entry_law
    {
        return Err(Error::config(
            "complex_vs_real_ratio: specs must agree in dimension and entry law",
        ));
    }
    if observables.is_empty() {
        return Err(Error::config("complex_vs_real_ratio: no observables"));
    }

    let mut b_points = Vec::new();
    let mut fns = Vec::new();
    for obs in observables {
        match obs {
            RatioObservable::AbsYSquared { b } => b_points.push(Complex64::new(b.0, b.1)),
            RatioObservable::VarianceZ { label } => fns.push(TestFunction::by_label(label)?),
        }
    }

    let evaluate = |spec: &EnsembleSpec| -> Result<Vec<Est>> {
        let sweep = run_sweep(spec, scale, &b_points, &fns, num_samples, false)?;
        let n_eta = spec.dimension as f64 * sweep.eta;
        let width = b_points.len() + fns.len();
        let mut acc = MCAccumulator::new(width);
        for (s, gbar, lin) in &sweep.rows {
            let mut row: Vec<Complex64> = gbar
                .iter()
                .zip(&sweep.m_values)
                .map(|(g, m)| (g - m) * n_eta)
                .collect();
            row.extend(
                lin.iter()
                    .zip(&sweep.centrings)
                    .map(|(v, c)| Complex64::new(v - c, 0.0)),
            );
            acc.push(*s, row);
        }
        let summary = acc.finalize(2);
        let mut out = Vec::new();
        let mut bi = 0usize;
        let mut fi = 0usize;
        for obs in observables {
            match obs {
                RatioObservable::AbsYSquared { .. } => {
                    let e = summary.cross_conj[bi][bi];
                    out.push(Est {
                        value: e.re,
                        se: e.se_re,
                    });
                    bi += 1;
                }
                RatioObservable::VarianceZ { .. } => {
                    let e = summary.mixed[b_points.len() + fi][&(1, 1)];
                    out.push(Est {
                        value: e.re,
                        se: e.se_re,
                    });
                    fi += 1;
                }
            }
        }
        Ok(out)
    };

    let real_side = evaluate(real_spec)?;
    let complex_side = evaluate(complex_spec)?;

    Ok(observables
        .iter()
        .zip(real_side.into_iter().zip(complex_side))
        .map(|(obs, (r, c))| {
            let ratio = c.value / r.value;
            let rel = ((c.se / c.value).powi(2) + (r.se / r.value).powi(2)).sqrt();
            RatioResult {
                observable: obs.clone(),
                complex_value: c,
                real_value: r,
                ratio: Est {
                    value: ratio,
                    se: ratio.abs() * rel,
                },
            }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct BiasPoint {
    pub dimension: usize,
    pub eta: f64,
    /// |mean(Gbar) - m(E + i eta)|
    pub bias: f64,
    pub se: f64,
    /// Coarse bound N^{alpha - 1}.
    pub coarse_bound: f64,
    pub noise_dominated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BiasRateFit {
    pub points: Vec<BiasPoint>,
    pub slope: Option<SlopeFit>,
    /// Set when any point's bias estimate is within 3 SE of zero, in which
    /// case the fitted slope measures noise rather than the decay rate.
    pub noise_dominated: bool,
}

/// Decay of the expectation bias |E Gbar - m| across dimensions.
pub fn bias_rate_fit(
    spec: &EnsembleSpec,
    alpha: f64,
    energy: f64,
    n_list: &[usize],
    num_samples: usize,
) -> Result<BiasRateFit> {
    if n_list.len() < 3 {
        return Err(Error::config(
            "bias_rate_fit: need at least 3 dimensions in n_list",
        ));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("bias_rate_fit: n_list must be increasing"));
    }
    let scale = MesoscopicScale::new(alpha, energy)?;

    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut sub = spec.clone();
        sub.dimension = n;
        // Decorrelate the per-dimension runs: with a shared seed the entry
        // streams at equal counters would reuse the same uniforms.
        sub.master_seed = spec.master_seed.wrapping_add(31 * n as u64);
        let sweep = run_sweep(&sub, &scale, &[Complex64::new(0.0, 1.0)], &[], num_samples, false)?;
        let mut acc = MCAccumulator::new(1);
        for (s, gbar, _) in &sweep.rows {
            acc.push(*s, vec![gbar[0]]);
        }
        let summary = acc.finalize(1);
        let mean = summary.means[0];
        let m = sweep.m_values[0];
        let bias = (mean.value() - m).norm();
        let se = mean.se_re.hypot(mean.se_im);
        points.push(BiasPoint {
            dimension: n,
            eta: sweep.eta,
            bias,
            se,
            coarse_bound: (n as f64).powf(alpha - 1.0),
            noise_dominated: bias <= 3.0 * se,
        });
    }

    let noise_dominated = points.iter().any(|p| p.noise_dominated);
    let xs: Vec<f64> = points.iter().map(|p| p.dimension as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.bias.max(1e-300)).collect();
    let slope = log_log_fit(&xs, &ys).ok();

    Ok(BiasRateFit {
        points,
        slope,
        noise_dominated,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalLawPoint {
    pub z: (f64, f64),
    pub avg_threshold: f64,
    pub entry_threshold: f64,
    pub avg_violation_fraction: f64,
    pub entry_violation_fraction: f64,
    /// Violation fraction of the stronger off-spectrum bound N^eps / N,
    /// reported when dist(z, [-2, 2]) >= 1.
    pub outside_violation_fraction: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalLawReport {
    pub dimension: usize,
    pub epsilon: f64,
    pub num_samples: usize,
    pub points: Vec<LocalLawPoint>,
    pub all_pass: bool,
}

/// Violation-fraction surrogate for the local semicircle law: per z, the
/// fraction of samples breaking |Gbar - m| <= N^eps/(N eta) or
/// max_ij |G_ij - delta_ij m| <= N^eps (sqrt(Im m/(N eta)) + 1/(N eta)).
pub fn local_law_check(
    spec: &EnsembleSpec,
    z_grid: &[Complex64],
    num_samples: usize,
    epsilon: f64,
) -> Result<LocalLawReport> {
    spec.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::config("local_law_check: epsilon must be > 0"));
    }
    if z_grid.is_empty() {
        return Err(Error::config("local_law_check: empty z grid"));
    }
    for z in z_grid {
        if !(z.re.abs() <= 10.0 && z.im > 0.0 && z.im <= 10.0) {
            return Err(Error::config(format!(
                "local_law_check: z = {z} outside the spectral domain S"
            )));
        }
    }
    let n = spec.dimension;
    let nf = n as f64;
    let n_eps = nf.powf(epsilon);

    struct Thresholds {
        z: Complex64,
        m: Complex64,
        avg: f64,
        entry: f64,
        outside: Option<f64>,
    }
    let thresholds: Vec<Thresholds> = z_grid
        .iter()
        .map(|&z| {
            let m = theory::stieltjes_m(z)?;
            let n_eta = nf * z.im;
            let far = z.im >= 1.0 + f64::EPSILON || z.re.abs() >= 3.0;
            Ok(Thresholds {
                z,
                m,
                avg: n_eps / n_eta,
                entry: n_eps * ((m.im / n_eta).sqrt() + 1.0 / n_eta),
                outside: far.then_some(n_eps / nf),
            })
        })
        .collect::<Result<_>>()?;

    // Per sample, per z: (avg bound violated, entry bound violated,
    // off-spectrum bound violated when applicable).
    type ViolationFlags = Vec<(bool, bool, Option<bool>)>;
    let counts: Vec<std::result::Result<ViolationFlags, String>> = (0..num_samples as u64)
        .into_par_iter()
        .map(|s| {
            let matrix = sample_matrix(spec, s).map_err(|e| e.to_string())?;
            let mut flags = Vec::with_capacity(thresholds.len());
            for t in &thresholds {
                let g = spectral::resolvent_matrix(&matrix, t.z).map_err(|e| e.to_string())?;
                let gbar = g.trace() / nf;
                let avg_dev = (gbar - t.m).norm();
                let mut entry_dev = 0.0f64;
                for i in 0..n {
                    for j in 0..n {
                        let target = if i == j {
                            t.m
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        entry_dev = entry_dev.max((g.entry(i, j) - target).norm());
                    }
                }
                flags.push((
                    avg_dev > t.avg,
                    entry_dev > t.entry,
                    t.outside.map(|bound| avg_dev > bound),
                ));
            }
            Ok(flags)
        })
        .collect();

    let mut ok_rows: Vec<ViolationFlags> = Vec::new();
    let mut aborted = 0usize;
    for c in counts {
        match c {
            Ok(row) => ok_rows.push(row),
            Err(_) => aborted += 1,
        }
    }
    if (aborted as f64) > MAX_ABORT_FRACTION * num_samples as f64 {
        return Err(Error::experiment(format!(
            "local_law_check: {aborted}/{num_samples} samples aborted"
        )));
    }
    let total = ok_rows.len() as f64;
    let points: Vec<LocalLawPoint> = thresholds
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let avg_frac = ok_rows.iter().filter(|r| r[k].0).count() as f64 / total;
            let entry_frac = ok_rows.iter().filter(|r| r[k].1).count() as f64 / total;
            let outside_frac = t.outside.map(|_| {
                ok_rows.iter().filter(|r| r[k].2 == Some(true)).count() as f64 / total
            });
            LocalLawPoint {
                z: (t.z.re, t.z.im),
                avg_threshold: t.avg,
                entry_threshold: t.entry,
                avg_violation_fraction: avg_frac,
                entry_violation_fraction: entry_frac,
                outside_violation_fraction: outside_frac,
                pass: avg_frac <= 0.01 && entry_frac <= 0.01,
            }
        })
        .collect();
    let all_pass = points.iter().all(|p| p.pass);
    Ok(LocalLawReport {
        dimension: n,
        epsilon,
        num_samples: ok_rows.len(),
        points,
        all_pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedMomentCell {
    pub n: u32,
    pub m: u32,
    pub empirical: EstC,
    pub predicted: f64,
    /// empirical/predicted for the diagonal cells (n = m).
    pub ratio: Option<Est>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedMomentTable {
    pub dimension: usize,
    pub alpha: f64,
    pub num_samples: usize,
    pub cells: Vec<MixedMomentCell>,
}

/// Empirical E <conj Gbar>^n <Gbar>^m against the predicted leading terms
/// for 2 <= n + m <= max_degree, at z = E + i eta.
pub fn mixed_moment_table(
    spec: &EnsembleSpec,
    scale: &MesoscopicScale,
    max_degree: u32,
    num_samples: usize,
) -> Result<MixedMomentTable> {
    if !(2..=4).contains(&max_degree) {
        return Err(Error::config(
            "mixed_moment_table: max_degree must lie in 2..=4",
        ));
    }
    let sweep = run_sweep(
        spec,
        scale,
        &[Complex64::new(0.0, 1.0)],
        &[],
        num_samples,
        false,
    )?;
    let mut acc = MCAccumulator::new(1);
    for (s, gbar, _) in &sweep.rows {
        acc.push(*s, vec![gbar[0]]);
    }
    let summary = acc.finalize(max_degree);
    let mut cells = Vec::new();
    for n in 0..=max_degree {
        for m in 0..=(max_degree - n) {
            if n + m < 2 {
                continue;
            }
            let empirical = summary.mixed[0][&(n, m)];
            let predicted = theory::predicted_mixed_moment(n, m, scale.alpha, spec.dimension);
            let ratio = (n == m).then(|| Est {
                value: empirical.re / predicted,
                se: empirical.se_re / predicted,
            });
            cells.push(MixedMomentCell {
                n,
                m,
                empirical,
                predicted,
                ratio,
            });
        }
    }
    Ok(MixedMomentTable {
        dimension: spec.dimension,
        alpha: scale.alpha,
        num_samples: sweep.rows.len(),
        cells,
    })
}
