//! TOML run configuration shared by every CLI subcommand.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::{FitModel, WeightSpec};
use crate::error::{Result, SheathError};
use crate::evolution::{PerturbationShape, PerturbationSpec, DEFAULT_CFL, DEFAULT_NEWTON_TOL};
use crate::params::PlasmaParams;
use crate::sagdeev::DEFAULT_QUAD_TOL;

fn default_n_cells() -> usize {
    2048
}
fn default_eps_tail() -> f64 {
    1e-6
}
fn default_table_segments() -> usize {
    600
}
fn default_quad_tol() -> f64 {
    DEFAULT_QUAD_TOL
}
fn default_t_end() -> f64 {
    50.0
}
fn default_cfl() -> f64 {
    DEFAULT_CFL
}
fn default_observer_period() -> f64 {
    0.5
}
fn default_newton_tol() -> f64 {
    DEFAULT_NEWTON_TOL
}
fn default_amplitude() -> f64 {
    1e-3
}
fn default_width() -> f64 {
    2.0
}
fn default_epsilon() -> f64 {
    4.0
}
fn default_alpha() -> f64 {
    4.0
}
fn default_prefix() -> String {
    "run".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Domain length; omit for the regime default.
    pub length: Option<f64>,
    #[serde(default = "default_n_cells")]
    pub n_cells: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { length: None, n_cells: default_n_cells() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryConfig {
    #[serde(default = "default_eps_tail")]
    pub eps_tail: f64,
    #[serde(default = "default_table_segments")]
    pub table_segments: usize,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self {
            eps_tail: default_eps_tail(),
            table_segments: default_table_segments(),
            quad_tol: default_quad_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    #[serde(default = "default_shape")]
    pub shape: PerturbationShape,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Default: a quarter of the domain length.
    pub center: Option<f64>,
    #[serde(default = "default_width")]
    pub width: f64,
}

fn default_shape() -> PerturbationShape {
    PerturbationShape::Gaussian
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            shape: default_shape(),
            amplitude: default_amplitude(),
            center: None,
            width: default_width(),
        }
    }
}

impl PerturbationConfig {
    pub fn to_spec(&self, domain_length: f64) -> PerturbationSpec {
        PerturbationSpec {
            shape: self.shape,
            amplitude: self.amplitude,
            center: self.center.unwrap_or(0.25 * domain_length),
            width: self.width,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_observer_period")]
    pub observer_period: f64,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default)]
    pub perturbation: PerturbationConfig,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_end: default_t_end(),
            cfl: default_cfl(),
            observer_period: default_observer_period(),
            newton_tol: default_newton_tol(),
            perturbation: PerturbationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Weight for the observer norm; omit for the regime default
    /// (algebraic (1+bx)^4 degenerate, exponential otherwise).
    pub weight: Option<WeightSpec>,
    pub fit_model: Option<FitModel>,
    /// Fit window; default [t_end/2, t_end].
    pub fit_window: Option<(f64, f64)>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// q-check beta; omit for 0.9 Gamma sqrt(phi_b).
    pub beta: Option<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            weight: None,
            fit_model: None,
            fit_window: None,
            epsilon: default_epsilon(),
            beta: None,
            alpha: default_alpha(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub gamma: f64,
    #[serde(rename = "T_inf")]
    pub t_inf: f64,
    pub u_inf: f64,
    pub phi_b: f64,
    #[serde(default = "default_prefix")]
    pub output_prefix: String,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub stationary: StationaryConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| SheathError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn params(&self) -> Result<PlasmaParams> {
        PlasmaParams::new(self.m, self.r, self.gamma, self.t_inf, self.u_inf, self.phi_b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.output_prefix.is_empty() {
            return Err(SheathError::Config("output_prefix must be nonempty".into()));
        }
        for (name, v) in [
            ("stationary.eps_tail", self.stationary.eps_tail),
            ("stationary.quad_tol", self.stationary.quad_tol),
            ("evolution.cfl", self.evolution.cfl),
            ("evolution.observer_period", self.evolution.observer_period),
            ("evolution.newton_tol", self.evolution.newton_tol),
            ("diagnostics.epsilon", self.diagnostics.epsilon),
        ] {
            if !(v > 0.0) {
                return Err(SheathError::Config(format!("{name} must be positive")));
            }
        }
        if self.evolution.t_end < 0.0 {
            return Err(SheathError::Config("evolution.t_end must be >= 0".into()));
        }
        if let Some(w) = &self.diagnostics.weight {
            w.validate().map_err(|e| SheathError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON serialization; recorded in every
    /// sidecar so artifacts can be traced to their exact configuration.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canon.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
m = 1.0
R = 1.0
gamma = 2.0
T_inf = 0.5
u_inf = -2.0
phi_b = -0.05
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = RunConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.grid.n_cells, 2048);
        assert_eq!(cfg.evolution.cfl, DEFAULT_CFL);
        assert!(cfg.params().is_ok());
    }

    #[test]
    fn missing_key_is_config_error() {
        let text = MINIMAL.replace("gamma = 2.0\n", "");
        match RunConfig::from_toml_str(&text) {
            Err(SheathError::Config(msg)) => assert!(msg.contains("gamma"), "{msg}"),
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{MINIMAL}\nbogus = 1.0\n");
        assert!(RunConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn hash_stable_and_sensitive() {
        let a = RunConfig::from_toml_str(MINIMAL).unwrap();
        let b = RunConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::from_toml_str(&MINIMAL.replace("-0.05", "-0.04")).unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn negative_tolerance_rejected() {
        let text = format!("{MINIMAL}\n[stationary]\nquad_tol = -1e-12\n");
        assert!(RunConfig::from_toml_str(&text).is_err());
    }
}
