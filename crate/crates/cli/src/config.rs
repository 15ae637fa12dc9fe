//! Experiment configuration file (TOML), its canonical form, and the digest
//! that identifies a run.
//!
//! Optional keys are filled with their defaults at parse time and the `--seed`
//! override is applied before canonicalization, so the digest covers the
//! settings the run actually used. The canonical form is the JSON encoding of
//! the resolved config with fixed field order.

use std::fs;
use std::path::Path;

use heavylimits::models::{InnovationLaw, ModelSpec};
use heavylimits::verify::{ExperimentConfig, Functional};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Iid,
    Ma,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: KindName,
    pub alpha: f64,
    pub p: f64,
    #[serde(default = "one")]
    pub scale: f64,
    /// Moving-average coefficients; required for `kind = "ma"`, forbidden
    /// otherwise.
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    /// Length of each finite-sample series.
    pub n: usize,
    /// Replicates on each side of the comparison.
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_u_min")]
    pub u_min: f64,
    #[serde(default = "default_functionals")]
    pub functionals: Vec<Functional>,
    #[serde(default = "default_theta_samples")]
    pub theta_samples: usize,
    #[serde(default = "default_constant_samples")]
    pub constant_samples: usize,
    #[serde(default = "default_ecf_samples")]
    pub ecf_samples: usize,
    #[serde(default = "default_ecf_z_max")]
    pub ecf_z_max: f64,
    #[serde(default = "default_ecf_z_step")]
    pub ecf_z_step: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    /// Number of sample paths written by `simulate`.
    #[serde(default = "one_usize")]
    pub paths: usize,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { paths: 1 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSection {
    /// Number of limit paths written by `limit`.
    #[serde(default = "one_usize")]
    pub paths: usize,
}

impl Default for LimitSection {
    fn default() -> Self {
        Self { paths: 1 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_small_jump_u")]
    pub small_jump_u: Vec<f64>,
    #[serde(default = "default_small_jump_delta")]
    pub small_jump_delta: f64,
    #[serde(default = "default_small_jump_reps")]
    pub small_jump_reps: usize,
    #[serde(default = "default_small_jump_n")]
    pub small_jump_n: usize,
    #[serde(default = "default_karamata_u")]
    pub karamata_u: Vec<f64>,
    #[serde(default = "default_karamata_n")]
    pub karamata_n: usize,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            small_jump_u: default_small_jump_u(),
            small_jump_delta: default_small_jump_delta(),
            small_jump_reps: default_small_jump_reps(),
            small_jump_n: default_small_jump_n(),
            karamata_u: default_karamata_u(),
            karamata_n: default_karamata_n(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: ModelSection,
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub limit: LimitSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_n_points() -> usize {
    10_000
}

fn default_u_min() -> f64 {
    0.05
}

fn default_functionals() -> Vec<Functional> {
    Functional::ALL.to_vec()
}

fn default_theta_samples() -> usize {
    200_000
}

fn default_constant_samples() -> usize {
    200_000
}

fn default_ecf_samples() -> usize {
    100_000
}

fn default_ecf_z_max() -> f64 {
    5.0
}

fn default_ecf_z_step() -> f64 {
    0.25
}

fn default_small_jump_u() -> Vec<f64> {
    vec![0.05, 0.1, 0.25, 0.5]
}

fn default_small_jump_delta() -> f64 {
    0.1
}

fn default_small_jump_reps() -> usize {
    400
}

fn default_small_jump_n() -> usize {
    2000
}

fn default_karamata_u() -> Vec<f64> {
    vec![0.25, 0.5, 1.0]
}

fn default_karamata_n() -> usize {
    1_000_000
}

impl FileConfig {
    /// Parses a config file and applies the seed override.
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        if let Some(seed) = seed_override {
            config.experiment.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.model_spec()?;
        let e = &self.experiment;
        if e.n == 0 {
            return Err(CliError::config("experiment.n: must be positive"));
        }
        if e.reps == 0 {
            return Err(CliError::config("experiment.reps: must be positive"));
        }
        if e.n_points == 0 {
            return Err(CliError::config("experiment.n_points: must be positive"));
        }
        if !(e.u_min > 0.0 && e.u_min <= 1.0) {
            return Err(CliError::config("experiment.u_min: must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn model_spec(&self) -> Result<ModelSpec<f64>, CliError> {
        let m = &self.model;
        let law = InnovationLaw::new(m.alpha, m.p, m.scale)
            .map_err(|e| CliError::config(format!("model: {e}")))?;
        match (m.kind, &m.coeffs) {
            (KindName::Iid, None) => Ok(ModelSpec::iid(law)),
            (KindName::Iid, Some(c)) if c == &[1.0] => Ok(ModelSpec::iid(law)),
            (KindName::Iid, Some(_)) => Err(CliError::config(
                "model.coeffs: only kind = \"ma\" takes coefficients",
            )),
            (KindName::Ma, Some(c)) => ModelSpec::ma(law, c.clone())
                .map_err(|e| CliError::config(format!("model.coeffs: {e}"))),
            (KindName::Ma, None) => {
                Err(CliError::config("model.coeffs: required for kind = \"ma\""))
            }
        }
    }

    pub fn experiment(&self) -> Result<ExperimentConfig<f64>, CliError> {
        let model = self.model_spec()?;
        let e = &self.experiment;
        let mut config = ExperimentConfig::new(model, e.n, e.reps, e.seed);
        config.n_points = e.n_points;
        config.u_min = e.u_min;
        config.functionals = e.functionals.clone();
        config.theta_samples = e.theta_samples;
        config.constant_samples = e.constant_samples;
        config.ecf_samples = e.ecf_samples;
        config.ecf_z_max = e.ecf_z_max;
        config.ecf_z_step = e.ecf_z_step;
        Ok(config)
    }

    /// Canonical encoding of the resolved config.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical form.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical().as_bytes());
        let out = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in out {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use heavylimits::models::ModelKind;
    use std::io::Write;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    const MINIMAL: &str = "[model]\nkind = \"iid\"\nalpha = 0.8\np = 1.0\n\n\
                           [experiment]\nn = 100\nreps = 10\n";

    #[test]
    fn minimal_config_fills_defaults() {
        let f = write_config(MINIMAL);
        let cfg = FileConfig::load(f.path(), None).unwrap();
        assert_eq!(cfg.experiment.n_points, 10_000);
        assert_eq!(cfg.experiment.seed, 0);
        assert_eq!(cfg.simulate.paths, 1);
        let spec = cfg.model_spec().unwrap();
        assert_eq!(spec.kind, ModelKind::Iid);
        let exp = cfg.experiment().unwrap();
        assert_eq!(exp.functionals.len(), 4);
        assert_eq!(exp.ecf_drift_injection, 0.0);
    }

    #[test]
    fn seed_override_changes_digest() {
        let f = write_config(MINIMAL);
        let a = FileConfig::load(f.path(), None).unwrap();
        let b = FileConfig::load(f.path(), Some(7)).unwrap();
        assert_eq!(b.experiment.seed, 7);
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), FileConfig::load(f.path(), None).unwrap().digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn bad_alpha_is_a_config_error_naming_the_field() {
        let f = write_config(
            "[model]\nkind = \"iid\"\nalpha = 2.5\np = 1.0\n\n[experiment]\nn = 10\nreps = 2\n",
        );
        let err = FileConfig::load(f.path(), None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let msg = err.to_string();
        assert!(msg.contains("alpha"), "{msg}");
        assert!(msg.contains("2.5"), "{msg}");
    }

    #[test]
    fn unknown_key_rejected() {
        let f = write_config(
            "[model]\nkind = \"iid\"\nalpha = 0.5\np = 1.0\nbogus = 3\n\n\
             [experiment]\nn = 10\nreps = 2\n",
        );
        let err = FileConfig::load(f.path(), None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn ma_requires_coeffs() {
        let f = write_config(
            "[model]\nkind = \"ma\"\nalpha = 0.5\np = 1.0\n\n[experiment]\nn = 10\nreps = 2\n",
        );
        let err = FileConfig::load(f.path(), None).unwrap_err();
        assert!(err.to_string().contains("coeffs"));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err =
            FileConfig::load(Path::new("/nonexistent/config.toml"), None).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
