//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 configuration/parse failure, 2 solver or
//! parameter error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use sheath_core::config::RunConfig;
use sheath_core::diagnostics::{decay_fit, FitModel};
use sheath_core::io;
use sheath_core::pipeline::{default_weight, load_profile, run_classify, Pipeline, Stage};
use sheath_core::SheathError as E;

#[derive(Parser)]
#[command(name = "sheath", about = "Plasma sheath laboratory", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overridden by SHEATH_OUT).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// quiet | info | debug
    #[arg(long, global = true, default_value = "info")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the far-field state and print derived constants.
    Classify,
    /// Build the stationary profile and write CSV + sidecar.
    Stationary,
    /// Check the far-field asymptotics of a stored or fresh profile.
    VerifyAsymptotics {
        /// Profile CSV (expects the JSON sidecar next to it).
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Highest derivative order to verify (degenerate regime).
        #[arg(long, default_value_t = 3)]
        orders: usize,
    },
    /// Time-integrate a perturbed profile.
    Evolve {
        /// Override [evolution].t_end.
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Evaluate the quadratic-form positivity claims.
    QCheck {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Fit a decay model to a norm series.
    DecayFit {
        /// Series CSV ("t,norm,..."); defaults to the pipeline artifact.
        #[arg(long)]
        series: Option<PathBuf>,
        /// exp | alg
        #[arg(long)]
        model: Option<String>,
        /// beta for the algebraic model.
        #[arg(long)]
        fit_beta: Option<f64>,
    },
    /// Run several stages in order.
    Pipeline {
        /// Comma-separated subset of
        /// stationary,verify-asymptotics,evolve,q-check,decay-fit.
        #[arg(long, default_value = "stationary,verify-asymptotics,evolve,q-check,decay-fit")]
        stages: String,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, E> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| E::Config("--config is required for this command".into()))?;
    RunConfig::from_file(path)
}

fn out_dir(cli: &Cli) -> PathBuf {
    std::env::var_os("SHEATH_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| cli.out.clone())
}

fn run(cli: &Cli) -> Result<(), E> {
    let quiet = cli.log_level == "quiet";
    match &cli.command {
        Command::Classify => {
            let config = load_config(cli)?;
            let report = run_classify(&config)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| E::Config(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
        Command::Stationary => {
            let config = load_config(cli)?;
            let mut p = Pipeline::new(&config, &out_dir(cli))?;
            p.run_stationary()?;
            if !quiet {
                eprintln!("profile written under {}", out_dir(cli).display());
            }
            Ok(())
        }
        Command::VerifyAsymptotics { profile, orders } => {
            let config = load_config(cli)?;
            let dir = out_dir(cli);
            if let Some(csv) = profile {
                let sidecar = csv.with_extension("json");
                let prof = load_profile(csv, &sidecar)?;
                let report = sheath_core::degenerate::verify_expansion(&prof, *orders)?;
                let path = dir.join(format!("{}_asymptotics.json", config.output_prefix));
                std::fs::create_dir_all(&dir)?;
                io::write_json(&path, &report)?;
                if !quiet {
                    eprintln!("report written to {}", path.display());
                }
                Ok(())
            } else {
                let mut p = Pipeline::new(&config, &dir)?;
                p.run_verify_asymptotics()?;
                Ok(())
            }
        }
        Command::Evolve { t_end } => {
            let mut config = load_config(cli)?;
            if let Some(te) = t_end {
                config.evolution.t_end = *te;
            }
            let mut p = Pipeline::new(&config, &out_dir(cli))?;
            p.run_evolve()?;
            Ok(())
        }
        Command::QCheck { epsilon, beta } => {
            let mut config = load_config(cli)?;
            if let Some(e) = epsilon {
                config.diagnostics.epsilon = *e;
            }
            if let Some(b) = beta {
                config.diagnostics.beta = Some(*b);
            }
            let mut p = Pipeline::new(&config, &out_dir(cli))?;
            p.run_q_check()?;
            Ok(())
        }
        Command::DecayFit { series, model, fit_beta } => {
            let config = load_config(cli)?;
            let dir = out_dir(cli);
            if let Some(path) = series {
                let (t, cols, _) = io::read_series_csv(path)?;
                let weight = default_weight(&config)?;
                let m = match model.as_deref() {
                    Some("exp") => FitModel::Exponential,
                    Some("alg") => FitModel::Algebraic {
                        beta: fit_beta.ok_or_else(|| {
                            E::Config("--fit-beta required with --model alg".into())
                        })?,
                    },
                    Some(other) => {
                        return Err(E::Config(format!("unknown model: {other}")))
                    }
                    None => match weight {
                        sheath_core::diagnostics::WeightSpec::Algebraic { beta, .. } => {
                            FitModel::Algebraic { beta }
                        }
                        _ => FitModel::Exponential,
                    },
                };
                let t_end = *t.last().unwrap_or(&0.0);
                let window = config
                    .diagnostics
                    .fit_window
                    .unwrap_or((0.5 * t_end, t_end));
                let fit = decay_fit(&t, &cols[0], m, window)?;
                let text = serde_json::to_string_pretty(&fit)
                    .map_err(|e| E::Config(e.to_string()))?;
                println!("{text}");
                Ok(())
            } else {
                let mut p = Pipeline::new(&config, &dir)?;
                p.run_decay_fit()?;
                Ok(())
            }
        }
        Command::Pipeline { stages } => {
            let config = load_config(cli)?;
            let parsed: Result<Vec<Stage>, _> =
                stages.split(',').map(|s| Stage::from_str(s.trim())).collect();
            let manifest = Pipeline::new(&config, &out_dir(cli))?.run(&parsed?)?;
            if !quiet {
                eprintln!(
                    "{} artifacts written under {}",
                    manifest.artifacts.len(),
                    out_dir(cli).display()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err @ (E::Config(_) | E::Io(_))) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
