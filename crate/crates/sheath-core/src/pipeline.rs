//! Stage orchestration: runs solver stages against one RunConfig, persists
//! artifacts under an output directory, and records a manifest.
//!
//! Stages can consume earlier stage outputs either in memory (same pipeline
//! invocation) or from disk (artifacts of a previous invocation); a missing
//! input is a DependencyMissing error, not a silent recompute.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::degenerate::{verify_expansion, ExpansionReport};
use crate::diagnostics::{
    decay_fit, energy_functional, quadratic_form_check, weighted_norm, DecayFit, FitModel,
    QuadraticFormReport, WeightSpec,
};
use crate::error::{Result, SheathError};
use crate::evolution::{
    evolve, make_initial_perturbation, EvolutionState, Observer, StepOptions,
};
use crate::io;
use crate::params::{classify_regime, degenerate_gamma, derived_constants, DerivedConstants,
    Regime, RegimeKind, DEFAULT_CLASSIFY_TOL};
use crate::sagdeev::Sagdeev;
use crate::stationary::{
    residual_check, solve_stationary, tail_decay_fit, GridRequest, ResidualReport,
    SheathProfile, StationaryOptions, TailReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Stationary,
    VerifyAsymptotics,
    Evolve,
    QCheck,
    DecayFit,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Stationary => "stationary",
            Stage::VerifyAsymptotics => "verify-asymptotics",
            Stage::Evolve => "evolve",
            Stage::QCheck => "q-check",
            Stage::DecayFit => "decay-fit",
        };
        f.write_str(s)
    }
}

impl FromStr for Stage {
    type Err = SheathError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stationary" => Ok(Stage::Stationary),
            "verify-asymptotics" => Ok(Stage::VerifyAsymptotics),
            "evolve" => Ok(Stage::Evolve),
            "q-check" => Ok(Stage::QCheck),
            "decay-fit" => Ok(Stage::DecayFit),
            other => Err(SheathError::Config(format!("unknown stage: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub stage: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config_hash: String,
    pub output_prefix: String,
    /// Wall-clock stamp; lives only here so data files stay deterministic.
    pub created_unix: u64,
    pub artifacts: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub regime: Regime,
    pub derived: DerivedConstants,
    pub config_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProfileSidecar {
    profile_meta: crate::stationary::ProfileMeta,
    regime: Regime,
    params: crate::params::PlasmaParams,
    config_hash: String,
    #[serde(skip_deserializing)]
    residuals: Option<ResidualReportOwned>,
}

#[derive(Debug, Clone, Serialize)]
struct ResidualReportOwned {
    mass_flux: f64,
    momentum: f64,
    entropy: f64,
    poisson: f64,
}

impl From<ResidualReport> for ResidualReportOwned {
    fn from(r: ResidualReport) -> Self {
        Self {
            mass_flux: r.mass_flux,
            momentum: r.momentum,
            entropy: r.entropy,
            poisson: r.poisson,
        }
    }
}

pub fn run_classify(config: &RunConfig) -> Result<ClassifyReport> {
    let params = config.params()?;
    let regime = classify_regime(&params, DEFAULT_CLASSIFY_TOL)?;
    let derived = derived_constants(&params, &regime)?;
    Ok(ClassifyReport { regime, derived, config_hash: config.hash() })
}

/// Regime default observer weight.
pub fn default_weight(config: &RunConfig) -> Result<WeightSpec> {
    if let Some(w) = &config.diagnostics.weight {
        return Ok(*w);
    }
    let params = config.params()?;
    let regime = classify_regime(&params, DEFAULT_CLASSIFY_TOL)?;
    match regime.kind {
        RegimeKind::Degenerate => {
            let gam = degenerate_gamma(&params);
            Ok(WeightSpec::Algebraic {
                alpha: config.diagnostics.alpha,
                beta: 0.9 * gam * params.phi_b.abs().sqrt(),
            })
        }
        _ => {
            let sag = Sagdeev::new(params, config.stationary.quad_tol)?;
            Ok(WeightSpec::Exponential { beta: 0.5 * sag.v_pp0().max(1e-12).sqrt() })
        }
    }
}

fn default_fit_model(config: &RunConfig, weight: &WeightSpec) -> FitModel {
    if let Some(m) = config.diagnostics.fit_model {
        return m;
    }
    match weight {
        WeightSpec::Algebraic { beta, .. } => FitModel::Algebraic { beta: *beta },
        WeightSpec::Exponential { .. } => FitModel::Exponential,
    }
}

pub struct Pipeline<'a> {
    pub config: &'a RunConfig,
    out_dir: PathBuf,
    artifacts: Vec<ManifestEntry>,
    profile: Option<SheathProfile>,
    final_state: Option<EvolutionState>,
    series_path: Option<PathBuf>,
}

impl<'a> Pipeline<'a> {
    pub fn new(config: &'a RunConfig, out_dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        Ok(Self {
            config,
            out_dir: out_dir.to_path_buf(),
            artifacts: Vec::new(),
            profile: None,
            final_state: None,
            series_path: None,
        })
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.out_dir
            .join(format!("{}_{suffix}", self.config.output_prefix))
    }

    fn record(&mut self, path: &Path, stage: Stage) {
        self.artifacts.push(ManifestEntry {
            file: path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            stage: stage.to_string(),
        });
    }

    pub fn run(mut self, stages: &[Stage]) -> Result<Manifest> {
        for stage in stages {
            match stage {
                Stage::Stationary => self.run_stationary()?,
                Stage::VerifyAsymptotics => self.run_verify_asymptotics()?,
                Stage::Evolve => self.run_evolve()?,
                Stage::QCheck => self.run_q_check()?,
                Stage::DecayFit => self.run_decay_fit()?,
            }
        }
        let manifest = Manifest {
            config_hash: self.config.hash(),
            output_prefix: self.config.output_prefix.clone(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            artifacts: self.artifacts.clone(),
        };
        let path = self.path("manifest.json");
        io::write_json(&path, &manifest)?;
        Ok(manifest)
    }

    pub fn run_stationary(&mut self) -> Result<()> {
        let params = self.config.params()?;
        let opts = StationaryOptions {
            eps_tail: self.config.stationary.eps_tail,
            table_segments: self.config.stationary.table_segments,
            quad_tol: self.config.stationary.quad_tol,
            classify_tol: DEFAULT_CLASSIFY_TOL,
        };
        let grid = GridRequest {
            length: self.config.grid.length,
            n_cells: self.config.grid.n_cells,
        };
        let profile = solve_stationary(&params, &grid, &opts)?;
        let residuals = residual_check(&profile);

        let csv = self.path("profile.csv");
        io::write_profile_csv(&csv, &profile)?;
        self.record(&csv, Stage::Stationary);

        let sidecar = ProfileSidecar {
            profile_meta: profile.meta.clone(),
            regime: profile.regime,
            params,
            config_hash: self.config.hash(),
            residuals: Some(residuals.into()),
        };
        let json = self.path("profile.json");
        io::write_json(&json, &sidecar)?;
        self.record(&json, Stage::Stationary);

        let gp = self.path("profile.gp");
        io::write_plot_script(
            &gp,
            csv.file_name().unwrap().to_str().unwrap(),
            "stationary sheath profile",
            "x",
            &[(2, "phi"), (3, "n"), (5, "T")],
            false,
        )?;
        self.record(&gp, Stage::Stationary);

        self.profile = Some(profile);
        Ok(())
    }

    fn require_profile(&mut self, for_stage: Stage) -> Result<&SheathProfile> {
        if self.profile.is_none() {
            let csv = self.path("profile.csv");
            let json = self.path("profile.json");
            if !csv.exists() || !json.exists() {
                return Err(SheathError::DependencyMissing {
                    stage: for_stage.to_string(),
                    missing: "stationary profile (run the stationary stage first)".into(),
                });
            }
            self.profile = Some(load_profile(&csv, &json)?);
        }
        Ok(self.profile.as_ref().unwrap())
    }

    pub fn run_verify_asymptotics(&mut self) -> Result<()> {
        let profile = self.require_profile(Stage::VerifyAsymptotics)?;
        let expansion: Option<ExpansionReport> =
            if profile.regime.kind == RegimeKind::Degenerate {
                Some(verify_expansion(profile, 3)?)
            } else {
                None
            };
        let tail: Option<TailReport> = tail_decay_fit(profile).ok();
        #[derive(Serialize)]
        struct AsymptoticsReport<'x> {
            expansion: &'x Option<ExpansionReport>,
            tail: &'x Option<TailReport>,
            config_hash: String,
        }
        let path = self.path("asymptotics.json");
        io::write_json(
            &path,
            &AsymptoticsReport { expansion: &expansion, tail: &tail,
                config_hash: self.config.hash() },
        )?;
        self.record(&path, Stage::VerifyAsymptotics);
        Ok(())
    }

    pub fn run_evolve(&mut self) -> Result<()> {
        let weight = default_weight(self.config)?;
        let profile = self.require_profile(Stage::Evolve)?.clone();
        let ev = &self.config.evolution;
        let spec = ev.perturbation.to_spec(profile.meta.length);
        let opts = StepOptions {
            cfl: ev.cfl,
            newton_tol: ev.newton_tol,
            ..StepOptions::default()
        };
        let initial = make_initial_perturbation(&profile, &spec, &opts)?;

        let observers: Vec<Observer> = vec![
            (
                "norm_1",
                Box::new({
                    let w = weight;
                    move |s: &EvolutionState, v: &crate::evolution::PerturbationView| {
                        weighted_norm(&[&v.varphi, &v.psi, &v.zeta], s.grid.h(), &w, 1)
                    }
                }),
            ),
            (
                "energy",
                Box::new({
                    let w = weight;
                    let base = profile.clone();
                    move |s: &EvolutionState, v: &crate::evolution::PerturbationView| {
                        energy_functional(s, v, &base, &w)
                    }
                }),
            ),
            (
                "sup_perturbation",
                Box::new(|_s: &EvolutionState, v: &crate::evolution::PerturbationView| {
                    v.varphi
                        .iter()
                        .chain(&v.psi)
                        .chain(&v.zeta)
                        .map(|x| x.abs())
                        .fold(0.0, f64::max)
                }),
            ),
        ];
        let (final_state, series) =
            evolve(&initial, &profile, ev.t_end, ev.observer_period, &observers, &opts)?;

        let csv = self.path("series.csv");
        io::write_series_csv(&csv, &series)?;
        self.record(&csv, Stage::Evolve);

        #[derive(Serialize)]
        struct SeriesSidecar<'x> {
            t_end: f64,
            weight: &'x WeightSpec,
            perturbation: crate::evolution::PerturbationSpec,
            config_hash: String,
        }
        let json = self.path("series.json");
        io::write_json(
            &json,
            &SeriesSidecar {
                t_end: ev.t_end,
                weight: &weight,
                perturbation: spec,
                config_hash: self.config.hash(),
            },
        )?;
        self.record(&json, Stage::Evolve);

        let snap = self.path("final.csv");
        io::write_state_csv(&snap, &final_state)?;
        self.record(&snap, Stage::Evolve);

        let gp = self.path("series.gp");
        io::write_plot_script(
            &gp,
            csv.file_name().unwrap().to_str().unwrap(),
            "perturbation decay",
            "t",
            &[(2, "norm_1"), (3, "energy")],
            true,
        )?;
        self.record(&gp, Stage::Evolve);

        self.series_path = Some(csv);
        self.final_state = Some(final_state);
        Ok(())
    }

    pub fn run_q_check(&mut self) -> Result<()> {
        let params = self.config.params()?;
        let gam = degenerate_gamma(&params);
        let beta = self
            .config
            .diagnostics
            .beta
            .unwrap_or(0.9 * gam * params.phi_b.abs().sqrt());
        let xs: Vec<f64> = (0..1000).map(|i| 0.1 * i as f64).collect();
        let report: QuadraticFormReport =
            quadratic_form_check(&params, self.config.diagnostics.epsilon, beta, &xs)?;
        let path = self.path("qcheck.json");
        io::write_json(&path, &report)?;
        self.record(&path, Stage::QCheck);
        Ok(())
    }

    pub fn run_decay_fit(&mut self) -> Result<()> {
        let series_path = match &self.series_path {
            Some(p) => p.clone(),
            None => {
                let p = self.path("series.csv");
                if !p.exists() {
                    return Err(SheathError::DependencyMissing {
                        stage: Stage::DecayFit.to_string(),
                        missing: "evolution series (run the evolve stage first)".into(),
                    });
                }
                p
            }
        };
        let (t, cols, names) = io::read_series_csv(&series_path)?;
        let idx = names
            .iter()
            .position(|n| n == "norm_1")
            .ok_or_else(|| SheathError::Config("series lacks a norm_1 column".into()))?;
        let weight = default_weight(self.config)?;
        let model = default_fit_model(self.config, &weight);
        let t_end = *t.last().unwrap_or(&0.0);
        let window = self
            .config
            .diagnostics
            .fit_window
            .unwrap_or((0.5 * t_end, t_end));
        let fit: DecayFit = decay_fit(&t, &cols[idx], model, window)?;
        #[derive(Serialize)]
        struct FitReport {
            fit: DecayFit,
            config_hash: String,
        }
        let path = self.path("decayfit.json");
        io::write_json(&path, &FitReport { fit, config_hash: self.config.hash() })?;
        self.record(&path, Stage::DecayFit);
        Ok(())
    }
}

/// Rebuild a profile from its CSV and JSON sidecar.
pub fn load_profile(csv: &Path, sidecar: &Path) -> Result<SheathProfile> {
    let text = std::fs::read_to_string(sidecar)?;
    let side: ProfileSidecar =
        serde_json::from_str(&text).map_err(|e| SheathError::Config(format!("sidecar: {e}")))?;
    let reader = std::io::BufReader::new(std::fs::File::open(csv)?);
    use std::io::BufRead;
    let mut x = Vec::new();
    let mut phi = Vec::new();
    let mut n = Vec::new();
    let mut u = Vec::new();
    let mut t = Vec::new();
    for (ln, line) in reader.lines().enumerate() {
        let line = line?;
        if ln == 0 {
            if line.trim() != "x,phi,n,u,T" {
                return Err(SheathError::Config(format!("bad profile header: {line}")));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(SheathError::Config(format!("bad profile row {ln}")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| SheathError::Config(format!("row {ln}: {e}")))
        };
        x.push(parse(cols[0])?);
        phi.push(parse(cols[1])?);
        n.push(parse(cols[2])?);
        u.push(parse(cols[3])?);
        t.push(parse(cols[4])?);
    }
    Ok(SheathProfile {
        x,
        phi,
        n,
        u,
        t,
        regime: side.regime,
        params: side.params,
        meta: side.profile_meta,
    })
}
