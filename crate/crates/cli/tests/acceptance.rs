//! Acceptance suite: desk-scale statistical and oracle-based checks of the
//! limiting predictions. One test per criterion; expensive Monte Carlo runs
//! are shared between criteria through lazy statics. Run with
//! `cargo test -p mesowig-cli --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::time::{Duration, Instant};

use mesowig::ensemble::EnsembleSpec;
use mesowig::gp;
use mesowig::hs::{self, ExtensionVariant};
use mesowig::spectral;
use mesowig::stats::{self, RatioObservable};
use mesowig::theory::{self, MesoscopicScale, TestFunction};
use mesowig_cli::config::{Experiment, ExperimentConfig};
use num_complex::Complex64;
use once_cell::sync::Lazy;

const SEED: u64 = 0x5eed_2026;

fn scale() -> MesoscopicScale {
    MesoscopicScale::new(0.5, 0.0).unwrap()
}

fn b3() -> Vec<Complex64> {
    vec![
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(0.0, 2.0),
    ]
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

/// Canonical GOE resolvent run shared by criteria 1, 2 and 5.
static RESOLVENT_RUN: Lazy<(stats::ResolventExperiment, Duration)> = Lazy::new(|| {
    let spec = EnsembleSpec::goe(1024, SEED);
    let t0 = Instant::now();
    let r = stats::run_resolvent_experiment(&spec, &scale(), &b3(), 2000).unwrap();
    (r, t0.elapsed())
});

/// Canonical GOE linear-statistic run shared by criteria 3 and 5.
static LINSTAT_RUN: Lazy<stats::LinstatExperiment> = Lazy::new(|| {
    let spec = EnsembleSpec::goe(1024, SEED + 1);
    stats::run_linstat_experiment(&spec, &scale(), &[TestFunction::cauchy()], 1200).unwrap()
});

#[test]
fn criterion_01_resolvent_clt_variance() {
    let (r, elapsed) = &*RESOLVENT_RUN;
    let var = r.cov_empirical[0][0];
    let dev = (var.re - 0.5).abs();
    let band = 3.0 * var.se_re;
    let pseudo = r.pseudo_cov_empirical[0][0];
    let pseudo_ok = pseudo.sigmas_from(Complex64::new(0.0, 0.0)) <= 3.0;

    // "15 minutes on 8 cores" as a core-budget: 7200 core-seconds.
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let core_seconds = elapsed.as_secs_f64() * cores as f64;
    let runtime_ok = core_seconds <= 7200.0;

    report(
        "criterion 1 (resolvent variance, Prop N_C(0,1/2))",
        dev <= band && pseudo_ok && runtime_ok,
        &format!(
            "E|Y(i)|^2 = {:.4} (target 0.5, |dev| {:.4} <= 3se {:.4}); \
             |E Y(i)^2| = ({:.2e},{:.2e}) within 3se; runtime {:.0}s on {cores} cores = {:.0} core-s (budget 7200)",
            var.re, dev, band, pseudo.re, pseudo.im, elapsed.as_secs_f64(), core_seconds
        ),
    );
}

#[test]
fn criterion_02_cross_point_covariance() {
    let (r, _) = &*RESOLVENT_RUN;
    let mut worst: (f64, String) = (0.0, String::new());
    for j in 0..3 {
        for k in 0..3 {
            let e = r.cov_empirical[j][k];
            let t = Complex64::new(r.cov_theory[j][k].0, r.cov_theory[j][k].1);
            let z = e.sigmas_from(t);
            if z > worst.0 {
                worst = (
                    z,
                    format!(
                        "entry ({j},{k}): emp ({:.4},{:.4}) vs theory ({:.4},{:.4})",
                        e.re, e.im, t.re, t.im
                    ),
                );
            }
        }
    }
    // The (i, 1+i) entry must target -2/(b1 - conj b2)^2 = 0.24 - 0.32i.
    let t01 = Complex64::new(r.cov_theory[0][1].0, r.cov_theory[0][1].1);
    let kernel_ok = (t01 - Complex64::new(0.24, -0.32)).norm() < 1e-12;
    report(
        "criterion 2 (cross-point covariance kernel)",
        worst.0 <= 3.0 && kernel_ok,
        &format!("worst z-score {:.2} ({}); kernel value check {}", worst.0, worst.1, kernel_ok),
    );
}

#[test]
fn criterion_03_test_function_variance() {
    let r = &*LINSTAT_RUN;
    let f = TestFunction::cauchy();
    let direct = theory::h_half_covariance(&f, &f).unwrap();
    let fourier = theory::h_half_variance_fourier(&f).unwrap();
    let routes_agree = (direct - fourier).abs() <= 1e-6;
    let var = r.variance[0];
    let dev = (var.re - direct).abs();
    let band = 3.0 * var.se_re;
    report(
        "criterion 3 (H^1/2 variance of cauchy)",
        routes_agree && dev <= band && (direct - 0.25).abs() < 1e-7,
        &format!(
            "Var Z = {:.4} +- {:.4} vs {direct:.8} (fourier {fourier:.8}, routes agree to {:.1e}); |dev| {:.4} <= {:.4}",
            var.re, var.se_re, (direct - fourier).abs(), dev, band
        ),
    );
}

#[test]
fn criterion_04_complex_class_halving() {
    let real = EnsembleSpec::goe(1024, SEED + 2);
    let complex = EnsembleSpec::gue(1024, SEED + 3);
    let out = stats::complex_vs_real_ratio(
        &real,
        &complex,
        &scale(),
        &[
            RatioObservable::AbsYSquared { b: (0.0, 1.0) },
            RatioObservable::VarianceZ {
                label: "cauchy".into(),
            },
        ],
        800,
    )
    .unwrap();
    let mut detail = String::new();
    let mut pass = true;
    for r in &out {
        let dev = (r.ratio.value - 0.5).abs();
        let band = 3.0 * r.ratio.se;
        pass &= dev <= band;
        detail.push_str(&format!(
            "{:?}: ratio {:.4} +- {:.4} (|dev| {:.4} <= {:.4}); ",
            r.observable, r.ratio.value, r.ratio.se, dev, band
        ));
    }
    report("criterion 4 (GUE/GOE variance halving)", pass, &detail);
}

#[test]
fn criterion_05_gaussianity() {
    let (r, _) = &*RESOLVENT_RUN;
    let re_samples: Vec<f64> = r.samples.iter().map(|row| row[0].0).collect();
    let im_samples: Vec<f64> = r.samples.iter().map(|row| row[0].1).collect();
    let ks_re = stats::ks_normality_test(&re_samples, 0.5).unwrap();
    let ks_im = stats::ks_normality_test(&im_samples, 0.5).unwrap();

    let lin = &*LINSTAT_RUN;
    let c3 = lin.third_cumulant[0];
    let c4 = lin.fourth_cumulant[0];
    let c3_ok = c3.value.abs() <= 3.0 * c3.se;
    let c4_ok = c4.value.abs() <= 3.0 * c4.se;

    report(
        "criterion 5 (Gaussianity: KS + vanishing cumulants)",
        ks_re.p_value >= 0.01 && ks_im.p_value >= 0.01 && c3_ok && c4_ok,
        &format!(
            "KS p(Re) = {:.3}, p(Im) = {:.3} (need >= 0.01); C3 = {:.4} +- {:.4}, C4 = {:.4} +- {:.4}",
            ks_re.p_value, ks_im.p_value, c3.value, c3.se, c4.value, c4.se
        ),
    );
}

#[test]
fn criterion_06_mixed_moments() {
    let mut pass = true;
    let mut detail = String::new();
    for (n, samples) in [(512usize, 2500usize), (1024, 2000)] {
        let spec = EnsembleSpec::goe(n, SEED + 4);
        let table = stats::mixed_moment_table(&spec, &scale(), 2, samples).unwrap();
        for cell in &table.cells {
            if cell.n == 1 && cell.m == 1 {
                let ratio = cell.ratio.unwrap();
                let dev = (ratio.value - 1.0).abs();
                pass &= dev <= 3.0 * ratio.se;
                detail.push_str(&format!(
                    "N={n} (1,1) ratio {:.4} +- {:.4}; ",
                    ratio.value, ratio.se
                ));
            } else {
                // Off-diagonal cells are consistent with zero at the
                // fluctuation scale.
                let z = cell.empirical.sigmas_from(Complex64::new(0.0, 0.0));
                pass &= z <= 3.0;
                detail.push_str(&format!("N={n} ({},{}) z {:.2}; ", cell.n, cell.m, z));
            }
        }
    }
    report("criterion 6 (mixed moments vs leading terms)", pass, &detail);
}

#[test]
fn criterion_07_bias_rate() {
    let spec = EnsembleSpec::goe(256, SEED + 5);
    let fit = stats::bias_rate_fit(&spec, 0.5, 0.0, &[256, 512, 1024, 2048], 256).unwrap();
    let coarse_ok = fit.points.iter().all(|p| p.bias <= p.coarse_bound);
    let c0 = theory::rate_c0(0.5).unwrap();
    let bound = 0.5 - 1.0 - c0 / 2.0;
    let slope_ok = if fit.noise_dominated {
        true
    } else {
        fit.slope.map_or(false, |s| s.slope <= bound)
    };
    let slope_str = fit
        .slope
        .map(|s| format!("{:.3} +- {:.3}", s.slope, s.slope_se))
        .unwrap_or_else(|| "n/a".into());
    report(
        "criterion 7 (bias decay rate)",
        coarse_ok && slope_ok,
        &format!(
            "slope {} vs bound {bound:.3}; noise_dominated = {}; per-N bias {:?}; coarse bound holds: {coarse_ok}",
            slope_str,
            fit.noise_dominated,
            fit.points
                .iter()
                .map(|p| format!("N={}: {:.2e}+-{:.2e}", p.dimension, p.bias, p.se))
                .collect::<Vec<_>>(),
        ),
    );
}

#[test]
fn criterion_08_local_law() {
    let spec = EnsembleSpec::goe(512, SEED + 6);
    let eta = (512f64).powf(-0.5);
    let z_grid: Vec<Complex64> = [-1.2, -0.5, 0.1, 0.7, 1.3]
        .iter()
        .map(|&e| Complex64::new(e, eta))
        .collect();
    let report_data = stats::local_law_check(&spec, &z_grid, 500, 0.2).unwrap();
    let detail: Vec<String> = report_data
        .points
        .iter()
        .map(|p| {
            format!(
                "z=({:.1},{:.3}): avg {:.3}% entry {:.3}%",
                p.z.0,
                p.z.1,
                100.0 * p.avg_violation_fraction,
                100.0 * p.entry_violation_fraction
            )
        })
        .collect();
    report(
        "criterion 8 (local semicircle law)",
        report_data.all_pass,
        &detail.join("; "),
    );
}

#[test]
fn criterion_09_oracle_equivalences() {
    let mut pass = true;
    let mut detail = String::new();

    // (a) hs_trace vs eigenvalue sum on an N = 32 sample.
    let spec = EnsembleSpec::goe(32, SEED + 7);
    let m = mesowig::sample_matrix(&spec, 0).unwrap();
    let s = spectral::eigenvalues(&m, 1e-10).unwrap();
    let f = TestFunction::cauchy();
    let (energy, eta) = (0.1, 0.25);
    let reference = spectral::linear_statistic(&s, &f, energy, eta).unwrap();
    let via_hs = hs::hs_trace(
        &s,
        &f,
        energy,
        eta,
        eta / 4.0,
        1e-6,
        ExtensionVariant::FirstOrder,
    )
    .unwrap();
    let hs_dev = (via_hs - reference).abs();
    pass &= hs_dev <= 1e-6;
    detail.push_str(&format!("hs_trace dev {hs_dev:.2e}; "));

    // (b) scalar reconstruction at 20 points.
    let ext = hs::AlmostAnalyticExtension::new(ExtensionVariant::FirstOrder, f.clone(), 1.0).unwrap();
    let mut worst_point = 0.0f64;
    for k in 0..20 {
        let lambda = -5.0 + 10.0 * (k as f64 + 0.5) / 20.0;
        let v = hs::hs_reconstruct_scalar(&ext, lambda, 1e-6).unwrap();
        worst_point = worst_point.max((v - f.eval(lambda)).abs());
    }
    pass &= worst_point <= 1e-6;
    detail.push_str(&format!("reconstruct worst {worst_point:.2e}; "));

    // (c) eigenvalues vs characteristic-polynomial roots for N <= 4.
    let mut worst_root = 0.0f64;
    for n in 2..=4usize {
        let spec = EnsembleSpec::goe(n, SEED + 8);
        for idx in 0..3u64 {
            let m = mesowig::sample_matrix(&spec, idx).unwrap();
            let ev = spectral::eigenvalues(&m, 1e-12).unwrap();
            let roots = charpoly_roots(&m);
            for (a, b) in ev.eigenvalues().iter().zip(&roots) {
                worst_root = worst_root.max((a - b).abs());
            }
        }
    }
    pass &= worst_root <= 1e-8;
    detail.push_str(&format!("charpoly worst {worst_root:.2e}; "));

    // (d) trace_resolvent via spectrum vs resolvent-matrix trace.
    let spec = EnsembleSpec::gue(24, SEED + 9);
    let m = mesowig::sample_matrix(&spec, 0).unwrap();
    let s = spectral::eigenvalues(&m, 1e-10).unwrap();
    let mut worst_trace = 0.0f64;
    for z in [Complex64::new(0.2, 0.5), Complex64::new(-1.0, 0.05)] {
        let via_spec = spectral::trace_resolvent(&s, z).unwrap();
        let via_matrix = spectral::resolvent_matrix(&m, z).unwrap().trace() / 24.0;
        worst_trace = worst_trace.max((via_spec - via_matrix).norm());
    }
    pass &= worst_trace <= 1e-6;
    detail.push_str(&format!("resolvent trace dev {worst_trace:.2e}; "));

    // (e) cumulant expansion: exact for Rademacher/cubic, Stein for
    // Gaussian/sin.
    let rad = stats::cumulant_expansion_check(
        stats::ScalarLaw::Rademacher,
        stats::SmoothFn::Monomial(3),
        3,
    )
    .unwrap();
    let stein = stats::cumulant_expansion_check(
        stats::ScalarLaw::Gaussian { variance: 1.0 },
        stats::SmoothFn::Sin,
        1,
    )
    .unwrap();
    pass &= rad.residual == 0.0 || rad.residual < 1e-14;
    pass &= stein.residual <= 1e-8;
    detail.push_str(&format!(
        "cumulant residuals: rademacher {:.1e}, stein {:.1e}",
        rad.residual, stein.residual
    ));

    report("criterion 9 (deterministic oracle equivalences)", pass, &detail);
}

#[test]
fn criterion_10_gp_sampler_self_consistency() {
    let b = b3();
    let k = gp::choose_truncation(&b, 1e-8).unwrap();
    let cfg = gp::GPConfig {
        truncation_k: k,
        seed: SEED + 10,
        target_tail_variance: 1e-8,
    };
    let rows = gp::sample_y(&b, &cfg, 100_000).unwrap();
    let nf = rows.len() as f64;
    let tol = 4.0 / nf.sqrt();
    let mut pass = true;
    let mut worst = 0.0f64;
    for j in 0..3 {
        for kk in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in &rows {
                acc += row[j] * row[kk].conj();
            }
            acc /= nf;
            let (theory_cov, _) = theory::resolvent_covariance(b[j], b[kk]).unwrap();
            let dev = (acc.re - theory_cov.re).abs().max((acc.im - theory_cov.im).abs());
            worst = worst.max(dev);
            pass &= dev <= tol;
        }
    }

    let f = TestFunction::cauchy();
    let z_rows = gp::sample_z(&[f.clone()], 100_000, SEED + 11).unwrap();
    let var: f64 = z_rows.iter().map(|r| r[0] * r[0]).sum::<f64>() / z_rows.len() as f64;
    let var_band = 4.0 * 2f64.sqrt() * 0.25 / nf.sqrt();
    let var_ok = (var - 0.25).abs() <= var_band;

    let dilated = f.dilate(2.0);
    let z2_rows = gp::sample_z(&[dilated], 100_000, SEED + 12).unwrap();
    let var2: f64 = z2_rows.iter().map(|r| r[0] * r[0]).sum::<f64>() / z2_rows.len() as f64;
    let dil_ok = (var2 - 0.25).abs() <= var_band + 1e-6;

    report(
        "criterion 10 (GP sampler self-consistency)",
        pass && var_ok && dil_ok,
        &format!(
            "worst |cov dev| {worst:.4} <= {tol:.4} (K = {k}); Var Z = {var:.4}; Var Z(f(2x)) = {var2:.4}"
        ),
    );
}

#[test]
fn criterion_11_reproducibility_across_workers() {
    let mut bytes = Vec::new();
    for workers in [1usize, 4, 8] {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.experiment = Experiment::ResolventClt;
        cfg.ensemble.dimension = 64;
        cfg.ensemble.master_seed = SEED + 13;
        cfg.num_samples = 64;
        cfg.b_points = Some(vec![[0.0, 1.0]]);
        cfg.num_workers = Some(workers);
        cfg.output_dir = dir.path().to_string_lossy().into_owned();
        let out = mesowig_cli::run(&cfg, None).unwrap();
        bytes.push(out.summary_bytes);
    }
    let pass = bytes[0] == bytes[1] && bytes[1] == bytes[2];
    report(
        "criterion 11 (worker-count reproducibility)",
        pass,
        "summary.json identical for 1, 4 and 8 workers",
    );
}

// --- independent characteristic-polynomial oracle -------------------------

/// Coefficients of det(x I - A) via the Faddeev-LeVerrier recursion,
/// followed by Durand-Kerner root finding on the companion polynomial.
/// Fully independent of the Householder/QL pipeline.
fn charpoly_roots(sample: &mesowig::MatrixSample) -> Vec<f64> {
    let n = sample.dimension();
    let a: Vec<f64> = (0..n * n)
        .map(|i| sample.entry(i / n, i % n).re)
        .collect();
    let mut m = vec![0.0; n * n]; // M_0 = I
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    let mut coeffs = vec![1.0f64]; // leading coefficient of x^n
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut am = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += a[i * n + l] * m[l * n + j];
                }
                am[i * n + j] = acc;
            }
        }
        let c = -am.iter().step_by(n + 1).sum::<f64>() / k as f64;
        coeffs.push(c);
        m = am;
        for i in 0..n {
            m[i * n + i] += c;
        }
    }

    // Durand-Kerner iteration.
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(0.4, 0.9).powu(k as u32 + 1))
        .collect();
    let poly = |x: Complex64| -> Complex64 {
        coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    };
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let delta = poly(roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    let mut out: Vec<f64> = roots.iter().map(|r| r.re).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}
