//! Experiment dispatch: builds the worker pool, runs the requested
//! operation, and assembles summary.json / results.csv / samples.jsonl /
//! manifest.json.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mesowig::gp;
use mesowig::hs::{self, ExtensionVariant};
use mesowig::spectral;
use mesowig::stats::{self, EstC};
use mesowig::theory::{self, TestFunction};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{CumulantFunction, CumulantLawName, Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::manifest::{now_unix, sha256_hex, RunManifest};
use crate::output::{atomic_write, build_csv, fmt, json_bytes};

/// Everything a run produced, with the summary bytes kept for callers that
/// verify reproducibility.
pub struct RunOutput {
    pub manifest: RunManifest,
    pub summary_path: PathBuf,
    pub summary_bytes: Vec<u8>,
}

struct Artifacts {
    results: Value,
    errors_bars: Value,
    results_csv: Vec<u8>,
    samples_jsonl: Option<Vec<u8>>,
    spectra_jsonl: Option<Vec<u8>>,
}

/// Run one experiment end to end. `raw_config` is the original config file
/// content, if any, recorded in the manifest's input hash.
pub fn run(config: &ExperimentConfig, raw_config: Option<&[u8]>) -> Result<RunOutput> {
    config.validate()?;
    let out_dir = Path::new(&config.output_dir);
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Config(format!("output_dir '{}': {e}", config.output_dir)))?;

    let started = now_unix();
    let workers = config
        .num_workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Output(format!("worker pool: {e}")))?;

    let artifacts = pool.install(|| dispatch(config))?;

    // The summary echoes the experiment-defining configuration. Worker
    // count and output directory are execution details: they must not
    // influence results, so they are kept out of the summary and its hash
    // (byte-identical summaries across worker counts are part of the
    // contract).
    let mut config_json = serde_json::to_value(config).expect("config serializes");
    if let Some(obj) = config_json.as_object_mut() {
        obj.remove("num_workers");
        obj.remove("output_dir");
    }
    let config_hash = sha256_hex(&serde_json::to_vec(&config_json).expect("config serializes"));
    let summary = json!({
        "experiment": config.experiment.name(),
        "config": config_json,
        "results": artifacts.results,
        "errors_bars": artifacts.errors_bars,
        "provenance": {
            "config_hash": config_hash,
            "seed": config.ensemble.master_seed,
            "version": env!("CARGO_PKG_VERSION"),
        },
    });
    let summary_bytes = json_bytes(&summary);

    let mut files: BTreeMap<String, String> = BTreeMap::new();
    files.insert("summary.json".into(), sha256_hex(&summary_bytes));
    files.insert("results.csv".into(), sha256_hex(&artifacts.results_csv));
    if let Some(samples) = &artifacts.samples_jsonl {
        files.insert("samples.jsonl".into(), sha256_hex(samples));
    }
    if let Some(spectra) = &artifacts.spectra_jsonl {
        files.insert("spectra.jsonl".into(), sha256_hex(spectra));
    }

    let manifest = RunManifest {
        config_hash,
        inputs_hash: sha256_hex(raw_config.unwrap_or_default()),
        started_unix: started,
        finished_unix: now_unix(),
        seed: config.ensemble.master_seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        files,
    };

    // All bytes exist; now write everything atomically.
    let summary_path = out_dir.join("summary.json");
    atomic_write(&summary_path, &summary_bytes)?;
    atomic_write(&out_dir.join("results.csv"), &artifacts.results_csv)?;
    if let Some(samples) = &artifacts.samples_jsonl {
        atomic_write(&out_dir.join("samples.jsonl"), samples)?;
    }
    if let Some(spectra) = &artifacts.spectra_jsonl {
        atomic_write(&out_dir.join("spectra.jsonl"), spectra)?;
    }
    let manifest_bytes = json_bytes(&serde_json::to_value(&manifest).expect("manifest"));
    atomic_write(&out_dir.join("manifest.json"), &manifest_bytes)?;

    Ok(RunOutput {
        manifest,
        summary_path,
        summary_bytes,
    })
}

fn dispatch(config: &ExperimentConfig) -> Result<Artifacts> {
    match config.experiment {
        Experiment::ResolventClt => resolvent_clt(config),
        Experiment::LinstatClt => linstat_clt(config),
        Experiment::LocalLaw => local_law(config),
        Experiment::BiasRate => bias_rate(config),
        Experiment::GpSample => gp_sample(config),
        Experiment::HsCheck => hs_check(config),
        Experiment::MixedMoments => mixed_moments(config),
        Experiment::CumulantCheck => cumulant_check(config),
        Experiment::TheoryDump => theory_dump(config),
    }
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn estc_value(e: &EstC) -> Value {
    json!([e.re, e.im])
}

fn estc_se(e: &EstC) -> Value {
    json!([e.se_re, e.se_im])
}

fn matrix_values(m: &[Vec<EstC>]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(estc_value).collect()))
            .collect(),
    )
}

fn matrix_ses(m: &[Vec<EstC>]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(estc_se).collect()))
            .collect(),
    )
}

fn mixed_map(moments: &BTreeMap<(u32, u32), EstC>, take_se: bool) -> Value {
    let mut map = serde_json::Map::new();
    for (&(n, m), est) in moments {
        let key = format!("n{n}_m{m}");
        map.insert(key, if take_se { estc_se(est) } else { estc_value(est) });
    }
    Value::Object(map)
}


fn spectra_jsonl(spectra: &[(u64, Vec<f64>)]) -> Option<Vec<u8>> {
    if spectra.is_empty() {
        return None;
    }
    let mut out = Vec::new();
    for (i, eigenvalues) in spectra {
        out.extend_from_slice(
            serde_json::to_string(&json!({"sample_index": i, "eigenvalues": eigenvalues}))
                .expect("row serializes")
                .as_bytes(),
        );
        out.push(b'\n');
    }
    Some(out)
}

fn resolvent_clt(config: &ExperimentConfig) -> Result<Artifacts> {
    let b = config.b_points();
    let r = stats::run_resolvent_experiment_with(
        &config.ensemble,
        &config.scale,
        &b,
        config.num_samples,
        config.persist_spectra,
    )?;

    let results = json!({
        "dimension": r.dimension,
        "eta": r.eta,
        "num_samples": r.num_samples,
        "aborted": r.aborted,
        "b_points": r.b_points,
        "means": Value::Array(r.means.iter().map(estc_value).collect()),
        "cov_empirical": matrix_values(&r.cov_empirical),
        "pseudo_cov_empirical": matrix_values(&r.pseudo_cov_empirical),
        "cov_theory": r.cov_theory,
        "mixed_moments": Value::Array(r.mixed_moments.iter().map(|m| mixed_map(m, false)).collect()),
    });
    let errors_bars = json!({
        "means": Value::Array(r.means.iter().map(estc_se).collect()),
        "cov_empirical": matrix_ses(&r.cov_empirical),
        "pseudo_cov_empirical": matrix_ses(&r.pseudo_cov_empirical),
        "mixed_moments": Value::Array(r.mixed_moments.iter().map(|m| mixed_map(m, true)).collect()),
    });

    let mut rows = Vec::new();
    for (j, bj) in r.b_points.iter().enumerate() {
        for (k, bk) in r.b_points.iter().enumerate() {
            let c = &r.cov_empirical[j][k];
            let p = &r.pseudo_cov_empirical[j][k];
            let t = r.cov_theory[j][k];
            rows.push(vec![
                fmt(bj.0),
                fmt(bj.1),
                fmt(bk.0),
                fmt(bk.1),
                fmt(c.re),
                fmt(c.im),
                fmt(c.se_re),
                fmt(c.se_im),
                fmt(t.0),
                fmt(t.1),
                fmt(p.re),
                fmt(p.im),
                fmt(p.se_re),
                fmt(p.se_im),
            ]);
        }
    }
    let results_csv = build_csv(
        &[
            "b1_re", "b1_im", "b2_re", "b2_im", "cov_re", "cov_im", "cov_se_re", "cov_se_im",
            "theory_re", "theory_im", "pseudo_re", "pseudo_im", "pseudo_se_re", "pseudo_se_im",
        ],
        &rows,
    )?;

    let samples_jsonl = config.persist_samples.then(|| {
        let mut out = Vec::new();
        for (i, row) in r.sample_indices.iter().zip(&r.samples) {
            let values: Vec<Value> = row.iter().map(|&(re, im)| json!([re, im])).collect();
            out.extend_from_slice(
                serde_json::to_string(&json!({"sample_index": i, "values": values}))
                    .expect("row serializes")
                    .as_bytes(),
            );
            out.push(b'\n');
        }
        out
    });

    Ok(Artifacts {
        results,
        errors_bars,
        results_csv,
        samples_jsonl,
        spectra_jsonl: spectra_jsonl(&r.spectra),
    })
}

fn linstat_clt(config: &ExperimentConfig) -> Result<Artifacts> {
    let labels = config.test_function_labels();
    let fns: Vec<TestFunction> = labels
        .iter()
        .map(|l| TestFunction::by_label(l))
        .collect::<mesowig::Result<_>>()?;
    let r = stats::run_linstat_experiment_with(
        &config.ensemble,
        &config.scale,
        &fns,
        config.num_samples,
        config.persist_spectra,
    )?;

    let results = json!({
        "dimension": r.dimension,
        "eta": r.eta,
        "num_samples": r.num_samples,
        "aborted": r.aborted,
        "labels": r.labels,
        "means": Value::Array(r.means.iter().map(estc_value).collect()),
        "covariance": matrix_values(&r.covariance),
        "cov_theory": r.cov_theory,
        "variance": Value::Array(r.variance.iter().map(estc_value).collect()),
        "third_cumulant": r.third_cumulant.iter().map(|e| e.value).collect::<Vec<_>>(),
        "fourth_cumulant": r.fourth_cumulant.iter().map(|e| e.value).collect::<Vec<_>>(),
    });
    let errors_bars = json!({
        "means": Value::Array(r.means.iter().map(estc_se).collect()),
        "covariance": matrix_ses(&r.covariance),
        "variance": Value::Array(r.variance.iter().map(estc_se).collect()),
        "third_cumulant": r.third_cumulant.iter().map(|e| e.se).collect::<Vec<_>>(),
        "fourth_cumulant": r.fourth_cumulant.iter().map(|e| e.se).collect::<Vec<_>>(),
    });

    let mut rows = Vec::new();
    for (j, lj) in r.labels.iter().enumerate() {
        for (k, lk) in r.labels.iter().enumerate() {
            let c = &r.covariance[j][k];
            rows.push(vec![
                lj.clone(),
                lk.clone(),
                fmt(c.re),
                fmt(c.se_re),
                fmt(r.cov_theory[j][k]),
            ]);
        }
    }
    let results_csv = build_csv(&["f1", "f2", "cov", "cov_se", "theory"], &rows)?;

    let samples_jsonl = config.persist_samples.then(|| {
        let mut out = Vec::new();
        for (i, row) in r.sample_indices.iter().zip(&r.samples) {
            out.extend_from_slice(
                serde_json::to_string(&json!({"sample_index": i, "values": row}))
                    .expect("row serializes")
                    .as_bytes(),
            );
            out.push(b'\n');
        }
        out
    });

    Ok(Artifacts {
        results,
        errors_bars,
        results_csv,
        samples_jsonl,
        spectra_jsonl: spectra_jsonl(&r.spectra),
    })
}

fn local_law(config: &ExperimentConfig) -> Result<Artifacts> {
    let z_grid: Vec<Complex64> = config
        .z_grid
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let r = stats::local_law_check(&config.ensemble, &z_grid, config.num_samples, config.epsilon)?;

    let n = r.num_samples as f64;
    let binomial_se = |p: f64| (p * (1.0 - p) / n).sqrt();
    let results = serde_json::to_value(&r).expect("report serializes");
    let errors_bars = json!({
        "violation_fraction_se": r
            .points
            .iter()
            .map(|p| json!([binomial_se(p.avg_violation_fraction), binomial_se(p.entry_violation_fraction)]))
            .collect::<Vec<_>>(),
    });

    let rows: Vec<Vec<String>> = r
        .points
        .iter()
        .map(|p| {
            vec![
                fmt(p.z.0),
                fmt(p.z.1),
                fmt(p.avg_threshold),
                fmt(p.avg_violation_fraction),
                fmt(p.entry_threshold),
                fmt(p.entry_violation_fraction),
                p.outside_violation_fraction.map(fmt).unwrap_or_default(),
                p.pass.to_string(),
            ]
        })
        .collect();
    let results_csv = build_csv(
        &[
            "z_re",
            "z_im",
            "avg_threshold",
            "avg_violation_fraction",
            "entry_threshold",
            "entry_violation_fraction",
            "outside_violation_fraction",
            "pass",
        ],
        &rows,
    )?;

    Ok(Artifacts {
        results,
        errors_bars,
        results_csv,
        samples_jsonl: None,
        spectra_jsonl: None,
    })
}

fn bias_rate(config: &ExperimentConfig) -> Result<Artifacts> {
    let n_list = config.n_list.clone().unwrap_or_default();
    let r = stats::bias_rate_fit(
        &config.ensemble,
        config.scale.alpha,
        config.scale.energy,
        &n_list,
        config.num_samples,
    )?;

    let results = serde_json::to_value(&r).expect("fit serializes");
    let errors_bars = json!({
        "bias_se": r.points.iter().map(|p| p.se).collect::<Vec<_>>(),
        "slope_se": r.slope.as_ref().map(|s| s.slope_se),
    });

    let rows: Vec<Vec<String>> = r
        .points
        .iter()
        .map(|p| {
            vec![
                p.dimension.to_string(),
                fmt(p.eta),
                fmt(p.bias),
                fmt(p.se),
                fmt(p.coarse_bound),
                p.noise_dominated.to_string(),
            ]
        })
        .collect();
    let results_csv = build_csv(
        &["N", "eta", "bias", "bias_se", "coarse_bound", "noise_dominated"],
        &rows,
    )?;

    Ok(Artifacts {
        results,
        errors_bars,
        results_csv,
        samples_jsonl: None,
        spectra_jsonl: None,
    })
}

fn gp_sample(config: &ExperimentConfig) -> Result<Artifacts> {
    let b = config.b_points();
    let labels = config.test_function_labels();
    let fns: Vec<TestFunction> = labels
        .iter()
        .map(|l| TestFunction::by_label(l))
        .collect::<mesowig::Result<_>>()?;

    let truncation = if config.gp_truncation_k > 0 {
        config.gp_truncation_k
    } else {
        gp::choose_truncation(&b, config.gp_tail_variance)?
    };
    let gp_config = gp::GPConfig {
        truncation_k: truncation,
        seed: config.ensemble.master_seed,
        target_tail_variance: config.gp_tail_variance,
    };
    let y_rows = gp::sample_y(&b, &gp_config, config.num_samples)?;
    // Distinct stream for the Z process; sharing the Y seed would couple
    // the two samplers draw for draw.
    let z_seed = config.ensemble.master_seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let z_rows = gp::sample_z(&fns, config.num_samples, z_seed)?;

    let mut acc = stats::MCAccumulator::new(b.len());
    for (i, row) in y_rows.iter().enumerate() {
        acc.push(i as u64, row.clone());
    }
    let y_summary = acc.finalize(2);
    let mut z_acc = stats::MCAccumulator::new(fns.len());
    for (i, row) in z_rows.iter().enumerate() {
        z_acc.push(
            i as u64,
            row.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        );
    }
    let z_summary = z_acc.finalize(2);

    let mut cov_theory = vec![vec![(0.0, 0.0); b.len()]; b.len()];
    for j in 0..b.len() {
        for k in 0..b.len() {
            let (c, _) = theory::resolvent_covariance(b[j], b[k])?;
            cov_theory[j][k] = (c.re, c.im);
        }
    }
    let z_var_theory: Vec<f64> = fns
        .iter()
        .map(|f| theory::h_half_covariance(f, f))
        .collect::<mesowig::Result<_>>()?;

    let results = json!({
        "truncation_k": truncation,
        "num_samples": config.num_samples,
        "b_points": b.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
        "cov_empirical": matrix_values(&y_summary.cross_conj),
        "pseudo_cov_empirical": matrix_values(&y_summary.cross_plain),
        "cov_theory": cov_theory,
        "z_labels": labels,
        "z_variance": Value::Array((0..fns.len()).map(|j| estc_value(&z_summary.mixed[j][&(1,1)])).collect()),
        "z_variance_theory": z_var_theory,
    });
    let errors_bars = json!({
        "cov_empirical": matrix_ses(&y_summary.cross_conj),
        "pseudo_cov_empirical": matrix_ses(&y_summary.cross_plain),
        "z_variance": Value::Array((0..fns.len()).map(|j| estc_se(&z_summary.mixed[j][&(1,1)])).collect()),
    });

    let mut rows = Vec::new();
    for (j, bj) in b.iter().enumerate() {
        for (k, bk) in b.iter().enumerate() {
            let c = &y_summary.cross_conj[j][k];
            rows.push(vec![
                "y_cov".into(),
                format!("{}+{}i", fmt(bj.re), fmt(bj.im)),
                format!("{}+{}i", fmt(bk.re), fmt(bk.im)),
                fmt(c.re),
                fmt(c.im),
                fmt(cov_theory[j][k].0),
                fmt(cov_theory[j][k].1),
            ]);
        }
    }
    for (j, label) in labels.iter().enumerate() {
        let v = &z_summary.mixed[j][&(1, 1)];
        rows.push(vec![
            "z_var".into(),
            label.clone(),
            label.clone(),
            fmt(v.re),
            fmt(0.0),
            fmt(z_var_theory[j]),
            fmt(0.0),
        ]);
    }
    let results_csv = build_csv(
        &["kind", "arg1", "arg2", "value_re", "value_im", "theory_re", "theory_im"],
        &rows,
    )?;

    let samples_jsonl = config.persist_samples.then(|| {
        let mut out = Vec::new();
        for (i, (y, z)) in y_rows.iter().zip(&z_rows).enumerate() {
            let values: Vec<Value> = y.iter().map(|v| json!([v.re, v.im])).collect();
            out.extend_from_slice(
                serde_json::to_string(&json!({
                    "sample_index": i,
                    "values": values,
                    "z_values": z,
                }))
                .expect("row serializes")
                .as_bytes(),
            );
            out.push(b'\n');
        }
        out
    });

    Ok(Artifacts {
        results,
        errors_bars,
        results_csv,
        samples_jsonl,
        spectra_jsonl: None,
    })
}

fn hs_check(config: &ExperimentConfig) -> Result<Artifacts> {
    let labels = config.test_function_labels();
    let n = config.ensemble.dimension;
    let eta = config.scale.eta(n);
    let sigma = eta / 4.0;
    let tol = config.quad_tol;

    let matrix = mesowig::sample_matrix(&config.ensemble, 0)?;
    let spectrum = spectral::eigenvalues(&matrix, 1e-10)?;

    let mut rows = Vec::new();
    let mut trace_entries = Vec::new();
    let mut point_entries = Vec::new();
    for label in &labels {
        let f = TestFunction::by_label(label)?;
        let reference = spectral::linear_statistic(&spectrum, &f, config.scale.energy, eta)?;
        for variant in [ExtensionVariant::FirstOrder, ExtensionVariant::DerivativeForm] {
            if variant == ExtensionVariant::DerivativeForm && !f.is_c2() {
                continue;
            }
            let value = hs::hs_trace(
                &spectrum,
                &f,
                config.scale.energy,
                eta,
                sigma,
                tol,
                variant,
            )?;
            let residual = (value - reference).abs();
            trace_entries.push(json!({
                "label": label,
                "variant": format!("{variant:?}"),
                "value": value,
                "reference": reference,
                "residual": residual,
            }));
            rows.push(vec![
                "trace".into(),
                label.clone(),
                format!("{variant:?}"),
                fmt(0.0),
                fmt(value),
                fmt(reference),
                fmt(residual),
            ]);
        }

        let ext = hs::AlmostAnalyticExtension::new(ExtensionVariant::FirstOrder, f.clone(), 1.0)?;
        for k in 0..20 {
            let lambda = -5.0 + 10.0 * (k as f64 + 0.5) / 20.0;
            let value = hs::hs_reconstruct_scalar(&ext, lambda, tol)?;
            let reference = f.eval(lambda);
            point_entries.push(json!({
                "label": label,
                "lambda": lambda,
                "value": value,
                "reference": reference,
                "residual": (value - reference).abs(),
            }));
            rows.push(vec![
                "point".into(),
                label.clone(),
                "first_order".into(),
                fmt(lambda),
                fmt(value),
                fmt(reference),
                fmt((value - reference).abs()),
            ]);
        }
    }

    let worst_trace = trace_entries
        .iter()
        .filter_map(|e| e["residual"].as_f64())
        .fold(0.0f64, f64::max);
    let worst_point = point_entries
        .iter()
        .filter_map(|e| e["residual"].as_f64())
        .fold(0.0f64, f64::max);

    let results = json!({
        "dimension": n,
        "eta": eta,
        "sigma": sigma,
        "quad_tol": tol,
        "traces": trace_entries,
        "points": point_entries,
        "worst_trace_residual": worst_trace,
        "worst_point_residual": worst_point,
        "pass": worst_trace <= tol && worst_point <= tol,
    });
    let results_csv = build_csv(
        &["kind", "label", "variant", "lambda", "value", "reference", "residual"],
        &rows,
    )?;

    Ok(Artifacts {
        results,
        errors_bars: json!({}),
        results_csv,
        samples_jsonl: None,
        spectra_jsonl: None,
    })
}

fn mixed_moments(config: &ExperimentConfig) -> Result<Artifacts> {
    let t = stats::mixed_moment_table(
        &config.ensemble,
        &config.scale,
        config.max_degree,
        config.num_samples,
    )?;
    let results = serde_json::to_value(&t).expect("table serializes");
    let errors_bars = json!({
        "empirical_se": t
            .cells
            .iter()
            .map(|c| json!([c.empirical.se_re, c.empirical.se_im]))
            .collect::<Vec<_>>(),
    });
    let rows: Vec<Vec<String>> = t
        .cells
        .iter()
        .map(|c| {
            vec![
                c.n.to_string(),
                c.m.to_string(),
                fmt(c.empirical.re),
                fmt(c.empirical.im),
                fmt(c.empirical.se_re),
                fmt(c.empirical.se_im),
                fmt(c.predicted),
                c.ratio.map(|r| fmt(r.value)).unwrap_or_default(),
                c.ratio.map(|r| fmt(r.se)).unwrap_or_default(),
            ]
        })
        .collect();
    let results_csv = build_csv(
        &[
            "n", "m", "emp_re", "emp_im", "se_re", "se_im", "predicted", "ratio", "ratio_se",
        ],
        &rows,
    )?;
    Ok(Artifacts {
        results,
        errors_bars,
        results_csv,
        samples_jsonl: None,
        spectra_jsonl: None,
    })
}

fn cumulant_check(config: &ExperimentConfig) -> Result<Artifacts> {
    let law = match config.cumulant_law.expect("validated") {
        CumulantLawName::Gaussian => stats::ScalarLaw::Gaussian {
            variance: config.cumulant_law_param,
        },
        CumulantLawName::Rademacher => stats::ScalarLaw::Rademacher,
        CumulantLawName::CenteredPoisson => stats::ScalarLaw::CenteredPoisson {
            lambda: config.cumulant_law_param,
        },
    };
    let f = match config.cumulant_function.expect("validated") {
        CumulantFunction::Sin => stats::SmoothFn::Sin,
        CumulantFunction::Linear => stats::SmoothFn::Monomial(1),
        CumulantFunction::Cubic => stats::SmoothFn::Monomial(3),
    };
    let check = stats::cumulant_expansion_check(law, f, config.expansion_order)?;
    let cumulants = law.cumulants(config.expansion_order as usize + 1);

    let results = json!({
        "law": law,
        "function": format!("{f:?}"),
        "order": config.expansion_order,
        "lhs": check.lhs,
        "rhs": check.rhs,
        "residual": check.residual,
        "cumulants": cumulants,
    });
    let rows = vec![vec![
        format!("{law:?}"),
        format!("{f:?}"),
        config.expansion_order.to_string(),
        fmt(check.lhs),
        fmt(check.rhs),
        fmt(check.residual),
    ]];
    let results_csv = build_csv(&["law", "function", "order", "lhs", "rhs", "residual"], &rows)?;
    Ok(Artifacts {
        results,
        errors_bars: json!({}),
        results_csv,
        samples_jsonl: None,
        spectra_jsonl: None,
    })
}

fn theory_dump(_config: &ExperimentConfig) -> Result<Artifacts> {
    // Density grid on [-2.2, 2.2] and a Stieltjes-transform grid over bulk
    // energies and a ladder of spectral scales.
    let mut rows = Vec::new();
    let mut rho_grid = Vec::new();
    for k in 0..=440 {
        let x = -2.2 + 0.01 * k as f64;
        let rho = theory::semicircle_density(x);
        rho_grid.push(json!([x, rho]));
        rows.push(vec![
            fmt(x),
            fmt(rho),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    let mut m_grid = Vec::new();
    for e_step in 0..13 {
        let energy = -1.8 + 0.3 * e_step as f64;
        for eta in [1.0, 0.3, 0.1, 0.03, 0.01] {
            let m = theory::stieltjes_m(Complex64::new(energy, eta))?;
            m_grid.push(json!([energy, eta, m.re, m.im]));
            rows.push(vec![
                String::new(),
                String::new(),
                fmt(energy),
                fmt(eta),
                fmt(m.re),
                fmt(m.im),
            ]);
        }
    }
    let results = json!({
        "rho_grid": rho_grid,
        "m_grid": m_grid,
    });
    let results_csv = build_csv(&["x", "rho", "E", "eta", "re_m", "im_m"], &rows)?;
    Ok(Artifacts {
        results,
        errors_bars: json!({}),
        results_csv,
        samples_jsonl: None,
        spectra_jsonl: None,
    })
}
