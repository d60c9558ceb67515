//! Chaos diagnostics: Poincare sections on the surface P = 0 and largest
//! Lyapunov exponents by two-trajectory renormalization.

use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::integrate::{integrate_adaptive, locate_p_crossings, IntegratorConfig};

/// Which P = 0 crossings enter the section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionFilter {
    Both,
    /// P increasing through zero.
    Upward,
    /// P decreasing through zero.
    Downward,
}

/// Trajectory points sampled where the electric field changes sign,
/// projected to (Mx, My).
#[derive(Debug, Clone)]
pub struct PoincareSection {
    pub points: Vec<(f64, f64)>,
    pub crossing_times: Vec<f64>,
    /// +1 for upward, -1 for downward crossings.
    pub directions: Vec<i8>,
    pub direction_filter: DirectionFilter,
    /// P was identically zero along the trajectory.
    pub degenerate: bool,
}

/// Section of the trajectory starting at `init` over [0, tau_end].
pub fn poincare_section(
    init: &StateVector,
    tau_end: f64,
    filter: DirectionFilter,
    cfg: &IntegratorConfig,
) -> Result<PoincareSection> {
    if !(tau_end > 0.0) {
        return Err(Error::InvalidParameter("tau_end must be positive".into()));
    }
    let traj = integrate_adaptive(init, tau_end, cfg)?;
    let ev = locate_p_crossings(&traj)?;

    let mut points = Vec::new();
    let mut crossing_times = Vec::new();
    let mut directions = Vec::new();
    for e in &ev.events {
        // dP/dtau = -2 My at the crossing
        let dir: i8 = if -2.0 * e.state.my >= 0.0 { 1 } else { -1 };
        let keep = match filter {
            DirectionFilter::Both => true,
            DirectionFilter::Upward => dir > 0,
            DirectionFilter::Downward => dir < 0,
        };
        if keep {
            points.push((e.state.mx, e.state.my));
            crossing_times.push(e.tau);
            directions.push(dir);
        }
    }
    Ok(PoincareSection {
        points,
        crossing_times,
        directions,
        direction_filter: filter,
        degenerate: ev.degenerate,
    })
}

/// For each prefix of the section, the number of eps-separated
/// representatives (greedy cover in insertion order). A periodic orbit
/// plateaus; a scattered map keeps growing.
pub fn epsilon_distinct_count(section: &PoincareSection, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let mut reps: Vec<(f64, f64)> = Vec::new();
    let mut history = Vec::with_capacity(section.points.len());
    for &(x, y) in &section.points {
        let covered = reps
            .iter()
            .any(|&(rx, ry)| ((x - rx).powi(2) + (y - ry).powi(2)).sqrt() < eps);
        if !covered {
            reps.push((x, y));
        }
        history.push(reps.len());
    }
    Ok(history)
}

/// Parameters of the two-trajectory growth-rate estimate.
#[derive(Debug, Clone, Copy)]
pub struct LyapunovConfig {
    /// Separation the perturbed trajectory is renormalized back to.
    pub delta0: f64,
    /// Fixed initial perturbation direction (normalized internally).
    pub direction: [f64; 5],
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            delta0: 1e-8,
            direction: [1.0, 1.0, 1.0, 1.0, 1.0],
            rel_tol: 1e-12,
            abs_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LyapunovEstimate {
    /// Final averaged growth rate, in 1/tau units.
    pub lambda_max: f64,
    /// Running estimate after each renormalization, as (tau, lambda).
    pub history: Vec<(f64, f64)>,
    pub renorm_interval: f64,
}

/// Largest Lyapunov exponent by the classic renormalization procedure:
/// follow a reference and a perturbed trajectory, rescale their separation
/// to delta0 every `renorm_dt`, and average the log growth factors.
pub fn lyapunov_max(
    init: &StateVector,
    tau_total: f64,
    renorm_dt: f64,
    lcfg: &LyapunovConfig,
) -> Result<LyapunovEstimate> {
    if !(renorm_dt > 0.0) || !(tau_total >= 100.0 * renorm_dt) {
        return Err(Error::InvalidParameter(format!(
            "tau_total ({tau_total}) must cover at least 100 renormalization intervals ({renorm_dt})"
        )));
    }
    let cfg = IntegratorConfig {
        rel_tol: lcfg.rel_tol,
        abs_tol: lcfg.abs_tol,
        sample_dt: renorm_dt,
        ..Default::default()
    };

    let dir_norm: f64 = lcfg.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if dir_norm == 0.0 {
        return Err(Error::InvalidParameter("perturbation direction is zero".into()));
    }
    let mut reference = *init;
    let mut perturbed = {
        let mut a = init.to_array();
        for i in 0..5 {
            a[i] += lcfg.delta0 * lcfg.direction[i] / dir_norm;
        }
        StateVector::from_array(a)
    };

    let n_intervals = (tau_total / renorm_dt).round() as usize;
    let mut log_sum = 0.0;
    let mut history = Vec::with_capacity(n_intervals);
    for k in 1..=n_intervals {
        let r = integrate_adaptive(&reference, renorm_dt, &cfg)?;
        let p = integrate_adaptive(&perturbed, renorm_dt, &cfg)?;
        reference = *r.states.last().unwrap();
        let p_end = *p.states.last().unwrap();
        let sep = p_end.distance(&reference);
        if sep == 0.0 {
            // identical trajectories (exact fixed point); growth rate is zero
            history.push((k as f64 * renorm_dt, 0.0));
            continue;
        }
        log_sum += (sep / lcfg.delta0).ln();
        let tau = k as f64 * renorm_dt;
        history.push((tau, log_sum / tau));
        // pull the perturbed state back to distance delta0 along the
        // current separation vector
        let ra = reference.to_array();
        let pa = p_end.to_array();
        let mut next = [0.0; 5];
        for i in 0..5 {
            next[i] = ra[i] + (pa[i] - ra[i]) * (lcfg.delta0 / sep);
        }
        perturbed = StateVector::from_array(next);
    }

    let lambda_max = history.last().map(|&(_, l)| l).unwrap_or(0.0);
    Ok(LyapunovEstimate {
        lambda_max,
        history,
        renorm_interval: renorm_dt,
    })
}
