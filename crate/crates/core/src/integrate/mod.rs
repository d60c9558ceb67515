//! Time integration of the model: adaptive embedded Runge-Kutta with dense
//! output, and a Strang splitting that rotates the spin exactly so the
//! Casimir is preserved to machine precision.

pub mod dopri5;
mod events;
mod splitting;

pub use events::{locate_events, locate_p_crossings, Event, EventList};

use crate::dynamics::{casimir, hamiltonian, vector_field_unchecked, StateVector};
use crate::error::{Error, Result};
use dopri5::{DenseSolution, Options};

/// Which scheme advances the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    AdaptiveRk,
    StrangSplit,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub method: Method,
    /// Fixed step for the splitting method.
    pub fixed_dt: f64,
    /// Output sampling interval; default pi/100 resolves the fast period pi.
    pub sample_dt: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            method: Method::AdaptiveRk,
            fixed_dt: 1e-3,
            sample_dt: std::f64::consts::PI / 100.0,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.method == Method::StrangSplit && !(self.fixed_dt > 0.0) {
            return Err(Error::InvalidParameter("fixed_dt must be positive".into()));
        }
        if !(self.sample_dt > 0.0) {
            return Err(Error::InvalidParameter("sample_dt must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrajectoryStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    pub max_hamiltonian_drift: f64,
    pub max_casimir_drift: f64,
}

/// Time-ordered samples of the state, with per-step interpolants when the
/// adaptive scheme produced them.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    dense: Option<DenseSolution<5>>,
    pub stats: TrajectoryStats,
}

impl Trajectory {
    pub fn has_dense(&self) -> bool {
        self.dense.is_some()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    /// State at an arbitrary time inside the covered interval. Uses dense
    /// output when available, otherwise linear interpolation of the samples.
    pub fn eval(&self, tau: f64) -> StateVector {
        if let Some(d) = &self.dense {
            return StateVector::from_array(d.eval(tau));
        }
        let i = self.times.partition_point(|&t| t < tau);
        if i == 0 {
            return self.states[0];
        }
        if i >= self.times.len() {
            return *self.states.last().unwrap();
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (tau - t0) / (t1 - t0);
        let a = self.states[i - 1].to_array();
        let b = self.states[i].to_array();
        let mut out = [0.0; 5];
        for j in 0..5 {
            out[j] = a[j] + w * (b[j] - a[j]);
        }
        StateVector::from_array(out)
    }

    /// Build a trajectory directly from samples (no dense output).
    /// Times must be strictly increasing and states finite.
    pub fn from_samples(times: Vec<f64>, states: Vec<StateVector>) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::InvalidParameter(
                "times and states must be non-empty and of equal length".into(),
            ));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        if states.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite {
                context: "Trajectory::from_samples",
            });
        }
        Ok(Self {
            times,
            states,
            dense: None,
            stats: TrajectoryStats::default(),
        })
    }
}

fn sample_times(tau_end: f64, sample_dt: f64) -> Vec<f64> {
    let n = (tau_end / sample_dt).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * sample_dt).collect();
    if tau_end - times[times.len() - 1] > 1e-12 * tau_end.max(1.0) {
        times.push(tau_end);
    } else {
        *times.last_mut().unwrap() = tau_end;
    }
    times
}

fn invariant_drifts(s0: &StateVector, states: &[StateVector]) -> (f64, f64) {
    let h0 = hamiltonian(s0);
    let c0 = casimir(s0);
    let mut dh: f64 = 0.0;
    let mut dc: f64 = 0.0;
    for s in states {
        dh = dh.max((hamiltonian(s) - h0).abs());
        dc = dc.max((casimir(s) - c0).abs());
    }
    (dh, dc)
}

/// Advance `s0` to `tau_end` with the adaptive scheme; dense output is kept
/// for every accepted step.
pub fn integrate_adaptive(s0: &StateVector, tau_end: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !s0.is_finite() {
        return Err(Error::NonFinite {
            context: "integrate_adaptive",
        });
    }
    if !(tau_end > 0.0) {
        return Err(Error::InvalidParameter("tau_end must be positive".into()));
    }
    let opts = Options {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        max_step: cfg.max_step,
        max_abs: 1e12,
    };
    let mut f = |_t: f64, y: &[f64; 5]| {
        vector_field_unchecked(&StateVector::from_array(*y)).to_array()
    };
    let sol = dopri5::integrate(&mut f, 0.0, s0.to_array(), tau_end, &opts)?;

    let times = sample_times(tau_end, cfg.sample_dt);
    let states: Vec<StateVector> = times
        .iter()
        .map(|&t| StateVector::from_array(sol.eval(t)))
        .collect();
    let (dh, dc) = invariant_drifts(s0, &states);

    Ok(Trajectory {
        times,
        states,
        stats: TrajectoryStats {
            accepted_steps: sol.stats.accepted,
            rejected_steps: sol.stats.rejected,
            rhs_evals: sol.stats.rhs_evals,
            max_hamiltonian_drift: dh,
            max_casimir_drift: dc,
        },
        dense: Some(sol),
    })
}

/// Advance `s0` to `tau_end` with the fixed-step Strang splitting.
pub fn integrate_splitting(s0: &StateVector, tau_end: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !(cfg.fixed_dt > 0.0) {
        return Err(Error::InvalidParameter("fixed_dt must be positive".into()));
    }
    if !s0.is_finite() {
        return Err(Error::NonFinite {
            context: "integrate_splitting",
        });
    }
    if !(tau_end > 0.0) {
        return Err(Error::InvalidParameter("tau_end must be positive".into()));
    }
    splitting::integrate(s0, tau_end, cfg)
}

/// Dispatch on `cfg.method`.
pub fn integrate(s0: &StateVector, tau_end: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    match cfg.method {
        Method::AdaptiveRk => integrate_adaptive(s0, tau_end, cfg),
        Method::StrangSplit => integrate_splitting(s0, tau_end, cfg),
    }
}
