//! TOML experiment configurations. Every struct rejects unknown keys so a
//! typo fails loudly before any computation starts.

use serde::Deserialize;
use std::f64::consts::PI;
use timecrystal::chaos::DirectionFilter;
use timecrystal::dynamics::StateVector;
use timecrystal::integrate::{IntegratorConfig, Method};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the invoked subcommand.
    pub command: String,
    #[serde(default)]
    pub integrator: IntegratorSection,
    pub initial: Option<InitialSection>,
    pub run: Option<RunSection>,
    pub window: Option<WindowSection>,
    pub base: Option<BaseSection>,
    pub cell: Option<CellSection>,
    pub problem: Option<ProblemSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    /// "adaptive" or "splitting".
    pub method: Option<String>,
    pub fixed_dt: Option<f64>,
    /// Output sampling interval in units of pi.
    pub sample_dt_pi: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default = "default_mx")]
    pub mx: f64,
    #[serde(default = "default_my")]
    pub my: f64,
    #[serde(default)]
    pub mz: f64,
    pub x: f64,
    #[serde(default = "default_p")]
    pub p: f64,
}

fn default_mx() -> f64 {
    0.009
}
fn default_my() -> f64 {
    -0.027
}
fn default_p() -> f64 {
    0.006
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Horizon for simulate / poincare, in units of pi.
    pub tau_end_pi: Option<f64>,
    /// Horizon for lyapunov, in units of pi.
    pub tau_total_pi: Option<f64>,
    pub renorm_dt_pi: Option<f64>,
    pub delta0: Option<f64>,
    pub direction: Option<[f64; 5]>,
    /// Poincare crossing filter: "both", "up" or "down".
    pub crossing_direction: Option<String>,
    pub epsilon: Option<f64>,
    /// Add the pair-number column N_p to simulate output.
    pub pair_number: Option<bool>,
    /// Which column the simulate plot shows.
    pub observable: Option<String>,
    /// Scan horizon for find-orbit, in units of pi.
    pub tau_horizon_pi: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub x0_min: f64,
    pub x0_max: f64,
    pub grid_n: usize,
}

/// Non-scanned initial values for find-orbit.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSection {
    #[serde(default = "default_mx")]
    pub mx: f64,
    #[serde(default = "default_my")]
    pub my: f64,
    #[serde(default)]
    pub mz: f64,
    #[serde(default = "default_p")]
    pub p: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSection {
    /// Modulation period in units of pi.
    pub period_pi: f64,
    /// Refine (X0, T) locally before tracing the cell.
    #[serde(default = "default_true")]
    pub refine: bool,
    /// Refuse candidates that do not certify as periodic.
    #[serde(default = "default_true")]
    pub require_periodic: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub energy: f64,
    /// "dphi1" or "dphi2".
    pub free_slot: String,
    pub y_max: Option<f64>,
    pub bracket: Option<[f64; 2]>,
}

impl ExperimentConfig {
    pub fn integrator_config(&self) -> Result<IntegratorConfig, String> {
        let mut cfg = IntegratorConfig::default();
        let s = &self.integrator;
        if let Some(v) = s.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = s.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = s.max_step {
            cfg.max_step = v;
        }
        if let Some(v) = s.fixed_dt {
            cfg.fixed_dt = v;
        }
        if let Some(v) = s.sample_dt_pi {
            cfg.sample_dt = v * PI;
        }
        if let Some(m) = &s.method {
            cfg.method = match m.as_str() {
                "adaptive" => Method::AdaptiveRk,
                "splitting" => Method::StrangSplit,
                other => return Err(format!("unknown integrator method '{other}'")),
            };
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn initial_state(&self) -> Result<StateVector, String> {
        let i = self
            .initial
            .as_ref()
            .ok_or("missing [initial] section".to_string())?;
        StateVector::new(i.mx, i.my, i.mz, i.x, i.p).map_err(|e| e.to_string())
    }

    pub fn run(&self) -> Result<&RunSection, String> {
        self.run.as_ref().ok_or("missing [run] section".into())
    }
}

pub fn crossing_filter(name: &str) -> Result<DirectionFilter, String> {
    match name {
        "both" => Ok(DirectionFilter::Both),
        "up" => Ok(DirectionFilter::Upward),
        "down" => Ok(DirectionFilter::Downward),
        other => Err(format!("unknown crossing direction '{other}'")),
    }
}

pub fn parse(text: &str, expected_command: &str) -> Result<ExperimentConfig, String> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
    if cfg.command != expected_command {
        return Err(format!(
            "config is for command '{}', but '{}' was invoked",
            cfg.command, expected_command
        ));
    }
    Ok(cfg)
}
