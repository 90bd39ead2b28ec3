//! Experiment configuration: a single human-editable TOML tree mirrored by
//! `--set key=value` command-line overrides.

use mesowig::ensemble::EnsembleSpec;
use mesowig::theory::MesoscopicScale;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    ResolventClt,
    LinstatClt,
    LocalLaw,
    BiasRate,
    GpSample,
    HsCheck,
    MixedMoments,
    CumulantCheck,
    TheoryDump,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::ResolventClt => "resolvent_clt",
            Experiment::LinstatClt => "linstat_clt",
            Experiment::LocalLaw => "local_law",
            Experiment::BiasRate => "bias_rate",
            Experiment::GpSample => "gp_sample",
            Experiment::HsCheck => "hs_check",
            Experiment::MixedMoments => "mixed_moments",
            Experiment::CumulantCheck => "cumulant_check",
            Experiment::TheoryDump => "theory_dump",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CumulantLawName {
    Gaussian,
    Rademacher,
    CenteredPoisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CumulantFunction {
    Sin,
    Linear,
    Cubic,
}

fn default_num_samples() -> usize {
    256
}
fn default_quad_tol() -> f64 {
    1e-6
}
fn default_epsilon() -> f64 {
    0.2
}
fn default_max_degree() -> u32 {
    4
}
fn default_law_param() -> f64 {
    1.0
}
fn default_expansion_order() -> u32 {
    3
}
fn default_tail_variance() -> f64 {
    1e-6
}
fn default_output_dir() -> String {
    "out".to_string()
}

/// Full description of one harness run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub ensemble: EnsembleSpec,
    pub scale: MesoscopicScale,
    #[serde(default = "default_num_samples")]
    pub num_samples: usize,
    /// Worker threads; defaults to available parallelism. Results are
    /// independent of this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_workers: Option<usize>,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub persist_samples: bool,
    /// Also dump raw eigenvalue spectra (spectra.jsonl) for the
    /// matrix-sampling experiments.
    #[serde(default)]
    pub persist_spectra: bool,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,

    /// Spectral points b (upper half-plane) as [re, im] pairs; used by
    /// resolvent_clt and gp_sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_points: Option<Vec<[f64; 2]>>,
    /// Catalog labels; used by linstat_clt, gp_sample and hs_check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_functions: Option<Vec<String>>,
    /// Increasing dimensions for bias_rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    /// Spectral grid for local_law as [re, im] pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_grid: Option<Vec<[f64; 2]>>,
    /// Stochastic-domination slack exponent for local_law.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Highest mixed-moment degree for mixed_moments.
    #[serde(default = "default_max_degree")]
    pub max_degree: u32,

    /// gp_sample: series truncation (0 = choose automatically from
    /// gp_tail_variance).
    #[serde(default)]
    pub gp_truncation_k: usize,
    #[serde(default = "default_tail_variance")]
    pub gp_tail_variance: f64,

    /// cumulant_check inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulant_law: Option<CumulantLawName>,
    #[serde(default = "default_law_param")]
    pub cumulant_law_param: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulant_function: Option<CumulantFunction>,
    #[serde(default = "default_expansion_order")]
    pub expansion_order: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::TheoryDump,
            ensemble: EnsembleSpec::goe(256, 1),
            scale: MesoscopicScale {
                alpha: 0.5,
                energy: 0.0,
            },
            num_samples: default_num_samples(),
            num_workers: None,
            output_dir: default_output_dir(),
            persist_samples: false,
            persist_spectra: false,
            quad_tol: default_quad_tol(),
            b_points: None,
            test_functions: None,
            n_list: None,
            z_grid: None,
            epsilon: default_epsilon(),
            max_degree: default_max_degree(),
            gp_truncation_k: 0,
            gp_tail_variance: default_tail_variance(),
            cumulant_law: None,
            cumulant_law_param: default_law_param(),
            cumulant_function: None,
            expansion_order: default_expansion_order(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Apply one `--set key=value` override by editing the TOML tree at the
    /// dotted path, e.g. `ensemble.dimension=512` or `num_samples=100`.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (path, raw_value) = assignment.split_once('=').ok_or_else(|| {
            CliError::Config(format!("--set expects key=value, got '{assignment}'"))
        })?;
        let mut doc: toml::Value = toml::Value::try_from(&*self)
            .map_err(|e| CliError::Config(format!("config serialization failed: {e}")))?;

        let parsed: toml::Value = parse_scalar(raw_value);
        let mut cursor = &mut doc;
        let segments: Vec<&str> = path.split('.').collect();
        for (i, seg) in segments.iter().enumerate() {
            let table = cursor.as_table_mut().ok_or_else(|| {
                CliError::Config(format!("{}: not a table", segments[..i].join(".")))
            })?;
            if i + 1 == segments.len() {
                table.insert(seg.to_string(), parsed);
                break;
            }
            cursor = table
                .entry(seg.to_string())
                .or_insert(toml::Value::Table(Default::default()));
        }
        *self = doc
            .try_into()
            .map_err(|e| CliError::Config(format!("{path}: {e}")))?;
        Ok(())
    }

    /// Field-level validation before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.ensemble
            .validate()
            .map_err(|e| CliError::Config(format!("ensemble: {e}")))?;
        self.scale
            .validate()
            .map_err(|e| CliError::Config(format!("scale: {e}")))?;
        if self.num_samples == 0 {
            return Err(CliError::Config("num_samples: must be >= 1".into()));
        }
        if let Some(w) = self.num_workers {
            if w == 0 {
                return Err(CliError::Config("num_workers: must be >= 1".into()));
            }
        }
        if !(self.quad_tol > 0.0) {
            return Err(CliError::Config("quad_tol: must be > 0".into()));
        }
        match self.experiment {
            Experiment::ResolventClt => {
                if self.b_points().is_empty() {
                    return Err(CliError::Config(
                        "b_points: resolvent_clt needs at least one spectral point".into(),
                    ));
                }
            }
            Experiment::LinstatClt => {
                if self.test_function_labels().is_empty() {
                    return Err(CliError::Config(
                        "test_functions: linstat_clt needs at least one label".into(),
                    ));
                }
            }
            Experiment::LocalLaw => {
                if self.z_grid.as_deref().unwrap_or_default().is_empty() {
                    return Err(CliError::Config(
                        "z_grid: local_law needs at least one spectral point".into(),
                    ));
                }
            }
            Experiment::BiasRate => {
                let n_list = self.n_list.as_deref().unwrap_or_default();
                if n_list.len() < 3 {
                    return Err(CliError::Config(
                        "n_list: bias_rate needs at least 3 increasing dimensions".into(),
                    ));
                }
            }
            Experiment::CumulantCheck => {
                if self.cumulant_law.is_none() {
                    return Err(CliError::Config(
                        "cumulant_law: required for cumulant_check".into(),
                    ));
                }
                if self.cumulant_function.is_none() {
                    return Err(CliError::Config(
                        "cumulant_function: required for cumulant_check".into(),
                    ));
                }
            }
            Experiment::HsCheck => {
                if self.ensemble.dimension > 128 {
                    return Err(CliError::Config(
                        "ensemble.dimension: hs_check is a quadrature cross-check; keep N <= 128"
                            .into(),
                    ));
                }
            }
            Experiment::GpSample | Experiment::MixedMoments | Experiment::TheoryDump => {}
        }
        Ok(())
    }

    pub fn b_points(&self) -> Vec<num_complex::Complex64> {
        self.b_points
            .as_deref()
            .unwrap_or(&[[0.0, 1.0]])
            .iter()
            .map(|p| num_complex::Complex64::new(p[0], p[1]))
            .collect()
    }

    pub fn test_function_labels(&self) -> Vec<String> {
        self.test_functions
            .clone()
            .unwrap_or_else(|| vec!["cauchy".to_string()])
    }
}

fn parse_scalar(raw: &str) -> toml::Value {
    let trimmed = raw.trim();
    // Try full TOML value syntax first (arrays, strings, booleans), then
    // bare numbers, then fall back to a plain string.
    if let Ok(v) = format!("v = {trimmed}").parse::<toml::Table>() {
        if let Some(v) = v.get("v") {
            return v.clone();
        }
    }
    if let Ok(i) = trimmed.parse::<i64>() {
        return toml::Value::Integer(i);
    }
    if let Ok(f) = trimmed.parse::<f64>() {
        return toml::Value::Float(f);
    }
    toml::Value::String(trimmed.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_override("ensemble.dimension=512").unwrap();
        cfg.apply_override("ensemble.entry_law=rademacher").unwrap();
        cfg.apply_override("scale.alpha=0.25").unwrap();
        cfg.apply_override("num_samples=77").unwrap();
        cfg.apply_override("b_points=[[0.0,1.0],[1.0,2.0]]").unwrap();
        assert_eq!(cfg.ensemble.dimension, 512);
        assert_eq!(cfg.scale.alpha, 0.25);
        assert_eq!(cfg.num_samples, 77);
        assert_eq!(cfg.b_points.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn bad_overrides_are_config_errors() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.apply_override("no_equals_sign").is_err());
        assert!(cfg.apply_override("ensemble.dimension=potato").is_err());
    }

    #[test]
    fn validation_requires_experiment_fields() {
        let mut cfg = ExperimentConfig::default();
        cfg.experiment = Experiment::BiasRate;
        cfg.n_list = Some(vec![128, 256]);
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        cfg.n_list = Some(vec![128, 256, 512]);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn exact_field_names_in_toml() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml_string();
        for key in [
            "experiment",
            "num_samples",
            "output_dir",
            "persist_samples",
            "quad_tol",
            "[ensemble]",
            "symmetry_class",
            "entry_law",
            "dimension",
            "diagonal_variance",
            "master_seed",
            "[scale]",
            "alpha",
            "energy",
        ] {
            assert!(text.contains(key), "missing {key} in:\n{text}");
        }
    }
}
